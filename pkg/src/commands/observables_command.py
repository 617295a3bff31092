from __future__ import annotations

import argparse
from typing import Any, Dict, List, Optional

import numpy as np
from loguru import logger

from src.commands.common import emit, output_dir, print_dry_run, resolve_run_config
from src.services.cfs_core import DiscreteCFS, pair_spectra
from src.services.observables import (
    ProjectionCache,
    Region,
    Subsystem,
    correlation_matrix,
    expectation,
    is_delocalized,
    is_localized,
    occupation,
    one_particle_measure,
    one_particle_support,
    position_observable,
    subsystem_from_vectors,
    total_system,
)
from src.services.scheduler import WorkScheduler
from src.utils.cfs_io import read_cfs, read_region, read_states, read_subsystem
from src.utils.csv_output import write_rows
from src.utils.json_output import write_json

CORRELATION_COLUMNS = ("i", "j", "b")


def observables_report(
    cfs: DiscreteCFS,
    states: np.ndarray,
    region: Region,
    omega: Subsystem,
    spectra: Optional[List[list]] = None,
) -> Dict[str, Any]:
    spectra = spectra or pair_spectra(cfs)
    projections = ProjectionCache(cfs)
    observable = position_observable(cfs, region, projections)
    per_state: List[Dict[str, Any]] = []
    for k, u in enumerate(states):
        per_state.append(
            {
                "index": k,
                "occupation": occupation(u, omega),
                "measure": one_particle_measure(cfs, u, region, projections),
                "support": one_particle_support(cfs, u, projections=projections).sorted(),
                "localized": is_localized(cfs, u, region, spectra),
                "delocalized": is_delocalized(cfs, u),
            }
        )
    return {
        "region": region.sorted(),
        "particle_number": omega.particle_number,
        "expectation": expectation(omega, observable, cfs.n, cfs.tol),
        "states": per_state,
    }


def run_observables(args: argparse.Namespace) -> int:
    run = resolve_run_config(
        args,
        "observables",
        inputs=[args.input],
        states=args.states,
        region=args.region,
        subsystem=args.subsystem,
    )
    if run.dry_run:
        return print_dry_run(run)
    cfs = read_cfs(args.input, run.tolerances)
    states = read_states(args.states) if args.states else np.zeros((0, cfs.N), dtype=complex)
    region = read_region(args.region) if args.region else Region.of(range(len(cfs)))
    if args.subsystem:
        omega = read_subsystem(args.subsystem)
    elif len(states):
        omega = subsystem_from_vectors(states)
    else:
        omega = total_system(cfs.N)

    with WorkScheduler(run.threads) as scheduler:
        spectra = pair_spectra(cfs, scheduler)
    report = observables_report(cfs, states, region, omega, spectra)
    out = output_dir(run)
    write_json(out / "observables.json", report)

    table = correlation_matrix(cfs, spectra)
    rows = [
        {"i": i, "j": j, "b": float(table[i, j])}
        for i in range(len(cfs))
        for j in range(len(cfs))
    ]
    path = write_rows(out / "correlation.csv", CORRELATION_COLUMNS, rows)
    logger.info(
        "Observables for {} states over {} points written to {}", len(states), len(cfs), out
    )
    emit({**report, "correlation_csv": str(path)})
    return 0


def register(subparsers: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser(
        "observables",
        parents=[parent],
        help="occupation, one-particle measure, localization and correlation strengths",
    )
    parser.add_argument("input", help="discrete CFS document")
    parser.add_argument("--states", default=None, help="state vectors (subsystem document)")
    parser.add_argument("--region", default=None, help="region document (default: all points)")
    parser.add_argument(
        "--subsystem",
        default=None,
        help="subsystem document for occupations (default: span of the states)",
    )
    parser.set_defaults(handler=run_observables)
