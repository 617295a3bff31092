from __future__ import annotations

import argparse
from typing import Any, Dict, List

from loguru import logger

from src.commands.common import emit, output_dir, print_dry_run, resolve_run_config
from src.config.config import SEA_BUDGET
from src.models.models import SeaSampleConfig
from src.services.dirac_sea import dirac_sea_sample, rank_statistics
from src.services.scheduler import WorkScheduler
from src.utils.cfs_io import read_sea_config, write_cfs


def _sea_config(path: str) -> SeaSampleConfig:
    sea = read_sea_config(path)
    if "budget" in sea.model_fields_set:
        return sea
    return sea.model_copy(update={"budget": SEA_BUDGET})


def _rank_summary(ranks: List[int]) -> Dict[str, Any]:
    return {
        "min": min(ranks),
        "max": max(ranks),
        "mean": sum(ranks) / len(ranks),
    }


def run_sea_sample(args: argparse.Namespace) -> int:
    run = resolve_run_config(args, "sea-sample", inputs=[args.config])
    run = run.model_copy(update={"sea": _sea_config(args.config)})
    if run.dry_run:
        return print_dry_run(run)
    with WorkScheduler(run.threads) as scheduler:
        cfs = dirac_sea_sample(run.sea, scheduler)
    path = write_cfs(output_dir(run) / "sea.json", cfs)
    ranks = rank_statistics(cfs)
    logger.info("Dirac sea with N = {} at {} points written to {}", cfs.N, len(cfs), path)
    emit({"N": cfs.N, "lattice": len(cfs), "rank": _rank_summary(ranks), "cfs": str(path)})
    return 0


def register(subparsers: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser(
        "sea-sample", parents=[parent], help="sample the box-discretized Dirac sea"
    )
    parser.add_argument("--config", required=True, help="sea-sample config document")
    parser.set_defaults(handler=run_sea_sample)
