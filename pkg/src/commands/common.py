"""Argument plumbing shared by every subcommand."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Any, Iterable, Optional

from loguru import logger

from src.config.config import OUTPUT_DIR, THREADS, TOL_HERM, TOL_RANK, TOL_REL_EQ, TOL_REL_REAL
from src.models.models import RunConfig, Tolerances
from src.utils.errors import StructuralError
from src.utils.json_output import dump_json


def common_parser() -> argparse.ArgumentParser:
    """Parent parser carrying the flags every subcommand accepts."""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--out", default=None, help=f"output directory (default: {OUTPUT_DIR})")
    parser.add_argument(
        "--tol-eq", type=float, default=None, help="relative equal-modulus tolerance"
    )
    parser.add_argument("--tol-real", type=float, default=None, help="relative realness tolerance")
    parser.add_argument("--threads", type=int, default=None, help="worker threads")
    parser.add_argument(
        "--dry-run", action="store_true", help="print the resolved configuration and exit"
    )
    return parser


def resolve_tolerances(args: argparse.Namespace) -> Tolerances:
    return Tolerances(
        rel_eq=args.tol_eq if args.tol_eq is not None else TOL_REL_EQ,
        rel_real=args.tol_real if args.tol_real is not None else TOL_REL_REAL,
        tol_rank=TOL_RANK,
        tol_herm=TOL_HERM,
    )


def _check_inputs(paths: Iterable[Optional[str]]) -> None:
    for path in paths:
        if path is not None and not Path(path).is_file():
            raise StructuralError(f"input file not found: {path}")


def resolve_run_config(args: argparse.Namespace, command: str, **fields: Any) -> RunConfig:
    """Flags over environment over TOML over defaults; referenced files must exist."""
    run = RunConfig(
        command=command,
        out_dir=args.out or OUTPUT_DIR,
        tolerances=resolve_tolerances(args),
        threads=args.threads if args.threads is not None else THREADS,
        dry_run=args.dry_run,
        **fields,
    )
    _check_inputs([*run.inputs, run.states, run.region, run.subsystem])
    return run


def output_dir(run: RunConfig) -> Path:
    path = Path(run.out_dir)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise StructuralError(f"cannot create output directory {path}: {exc}") from exc
    if not os.access(path, os.W_OK):
        raise StructuralError(f"output directory is not writable: {path}")
    return path


def emit(content: Any) -> None:
    """Write a JSON document to stdout."""
    sys.stdout.write(dump_json(content, pretty=True) + "\n")
    sys.stdout.flush()


def print_dry_run(run: RunConfig) -> int:
    logger.info("Dry run of '{}'; nothing is computed", run.command)
    emit(run)
    return 0


__all__ = [
    "common_parser",
    "emit",
    "output_dir",
    "print_dry_run",
    "resolve_run_config",
    "resolve_tolerances",
]
