from __future__ import annotations

import argparse
from typing import Any, Dict, List

from loguru import logger

from src.commands.common import emit, output_dir, print_dry_run, resolve_run_config
from src.models.models import ELParams, RunConfig
from src.services.cfs_core import (
    DiscreteCFS,
    action,
    el_residuals,
    fit_volume_multiplier,
    pair_spectra,
)
from src.services.scheduler import WorkScheduler
from src.utils.cfs_io import read_cfs
from src.utils.csv_output import write_rows
from src.utils.json_output import write_json

EL_COLUMNS = ("index", "l", "tr_x", "s_vol")


def _el_params(args: argparse.Namespace) -> ELParams:
    return ELParams(kappa=args.kappa, r_tr=args.r_tr, s_vol=args.s_vol or 0.0)


def _resolve(args: argparse.Namespace, command: str) -> RunConfig:
    return resolve_run_config(args, command, inputs=[args.input], el=_el_params(args))


def _with_volume_multiplier(
    cfs: DiscreteCFS, params: ELParams, fixed: bool, spectra: List[list]
) -> ELParams:
    if fixed:
        return params
    s_vol = fit_volume_multiplier(cfs, params, spectra)
    logger.info("Volume multiplier fitted to {:.6e}", s_vol)
    return ELParams(kappa=params.kappa, r_tr=params.r_tr, s_vol=s_vol)


def action_report(cfs: DiscreteCFS, params: ELParams, spectra: List[list]) -> Dict[str, Any]:
    report = action(cfs, spectra)
    residuals = el_residuals(cfs, params, spectra)
    return {
        **report.model_dump(),
        "el_params": params.model_dump(),
        "el_residuals": residuals.tolist(),
    }


def run_action(args: argparse.Namespace) -> int:
    run = _resolve(args, "action")
    if run.dry_run:
        return print_dry_run(run)
    cfs = read_cfs(args.input, run.tolerances)
    with WorkScheduler(run.threads) as scheduler:
        spectra = pair_spectra(cfs, scheduler)
    params = _with_volume_multiplier(cfs, run.el, args.s_vol is not None, spectra)
    report = action_report(cfs, params, spectra)
    path = write_json(output_dir(run) / "action.json", report)
    logger.info("Action report for {} points written to {}", len(cfs), path)
    emit(report)
    return 0


def run_el(args: argparse.Namespace) -> int:
    run = _resolve(args, "el")
    if run.dry_run:
        return print_dry_run(run)
    cfs = read_cfs(args.input, run.tolerances)
    with WorkScheduler(run.threads) as scheduler:
        spectra = pair_spectra(cfs, scheduler)
    params = _with_volume_multiplier(cfs, run.el, args.s_vol is not None, spectra)
    residuals = el_residuals(cfs, params, spectra)
    rows = [
        {"index": i, "l": float(value), "tr_x": p.trace(), "s_vol": params.s_vol}
        for i, (value, p) in enumerate(zip(residuals, cfs.points))
    ]
    path = write_rows(output_dir(run) / "el.csv", EL_COLUMNS, rows)
    emit({"points": len(cfs), "s_vol": params.s_vol, "csv": str(path)})
    return 0


def register(subparsers: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    el_flags = argparse.ArgumentParser(add_help=False)
    el_flags.add_argument("input", help="discrete CFS document")
    el_flags.add_argument("--kappa", type=float, default=0.0, help="boundedness multiplier")
    el_flags.add_argument("--r-tr", type=float, default=0.0, help="trace multiplier")
    el_flags.add_argument(
        "--s-vol",
        type=float,
        default=None,
        help="volume multiplier (default: fitted so that l vanishes on average)",
    )

    action_parser = subparsers.add_parser(
        "action", parents=[parent, el_flags], help="causal action and constraint report"
    )
    action_parser.set_defaults(handler=run_action)

    el_parser = subparsers.add_parser(
        "el", parents=[parent, el_flags], help="per-point Euler-Lagrange residuals"
    )
    el_parser.set_defaults(handler=run_el)
