from __future__ import annotations

import argparse

from loguru import logger

from src.commands.common import emit, output_dir, print_dry_run, resolve_run_config
from src.models.models import KernelGridConfig, KernelParams
from src.services.minkowski import KERNEL_TABLE_COLUMNS, kernel_table
from src.utils.cfs_io import read_model
from src.utils.csv_output import write_rows


def _grid(args: argparse.Namespace) -> KernelGridConfig:
    grid = read_model(args.config, KernelGridConfig)
    if args.mass is None and args.eps is None:
        return grid
    params = KernelParams(
        m=args.mass if args.mass is not None else grid.kernel.m,
        eps=args.eps if args.eps is not None else grid.kernel.eps,
    )
    return grid.model_copy(update={"kernel": params})


def run_kernel(args: argparse.Namespace) -> int:
    run = resolve_run_config(args, "kernel", inputs=[args.config])
    run = run.model_copy(update={"kernel": _grid(args)})
    if run.dry_run:
        return print_dry_run(run)
    rows = kernel_table(run.kernel.pairs(), run.kernel.kernel)
    path = write_rows(output_dir(run) / "kernel.csv", KERNEL_TABLE_COLUMNS, rows)
    logger.info("Kernel table with {} rows written to {}", len(rows), path)
    emit({"rows": len(rows), "csv": str(path)})
    return 0


def register(subparsers: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser(
        "kernel", parents=[parent], help="continuum kernel and closed-chain table on a (t, r) grid"
    )
    parser.add_argument("--config", required=True, help="kernel grid document")
    parser.add_argument("--mass", type=float, default=None, help="override the mass m")
    parser.add_argument("--eps", type=float, default=None, help="override the regularization eps")
    parser.set_defaults(handler=run_kernel)
