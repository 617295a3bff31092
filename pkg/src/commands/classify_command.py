from __future__ import annotations

import argparse
from typing import Dict, List, Optional

from loguru import logger

from src.commands.common import emit, output_dir, print_dry_run, resolve_run_config
from src.services.cfs_core import DiscreteCFS, classify, lagrangian, pair_spectra
from src.services.observables import correlation_matrix
from src.services.scheduler import WorkScheduler
from src.utils.cfs_io import read_cfs
from src.utils.csv_output import write_rows

CLASSIFY_COLUMNS = ("i", "j", "class", "lagrangian", "b_total")


def classify_rows(
    cfs: DiscreteCFS, scheduler: Optional[WorkScheduler] = None
) -> List[Dict[str, object]]:
    """One row per ordered pair (i, j), row-major."""
    spectra = pair_spectra(cfs, scheduler)
    b_total = correlation_matrix(cfs, spectra)
    rows: List[Dict[str, object]] = []
    for i, row in enumerate(spectra):
        for j, spec in enumerate(row):
            rows.append(
                {
                    "i": i,
                    "j": j,
                    "class": classify(spec, cfs.tol).value,
                    "lagrangian": lagrangian(spec, cfs.n, cfs.tol),
                    "b_total": float(b_total[i, j]),
                }
            )
    return rows


def run_classify(args: argparse.Namespace) -> int:
    run = resolve_run_config(args, "classify", inputs=[args.input])
    if run.dry_run:
        return print_dry_run(run)
    cfs = read_cfs(args.input, run.tolerances)
    with WorkScheduler(run.threads) as scheduler:
        rows = classify_rows(cfs, scheduler)
    path = write_rows(output_dir(run) / "classify.csv", CLASSIFY_COLUMNS, rows)
    logger.info("Classified {} pairs of {} points into {}", len(rows), len(cfs), path)
    emit({"points": len(cfs), "pairs": len(rows), "csv": str(path)})
    return 0


def register(subparsers: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser(
        "classify", parents=[parent], help="pairwise causal classification table"
    )
    parser.add_argument("input", help="discrete CFS document")
    parser.set_defaults(handler=run_classify)
