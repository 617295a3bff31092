from __future__ import annotations

import argparse
from pathlib import Path
from typing import List, Optional

from loguru import logger

from src.commands.common import emit, output_dir, print_dry_run, resolve_run_config
from src.config.config import (
    QUAD_BASE_PANELS,
    QUAD_MAX_DEPTH,
    QUAD_ORDER,
    QUAD_TARGET_REL_ERR,
    SWEEP_BOX_LEN,
    SWEEP_EPS_LIST,
    SWEEP_MASS,
    SWEEP_SIGMA_MODE,
)
from src.models.models import FitResult, QuadSettings, SweepConfig, SweepResult
from src.services.scheduler import WorkScheduler
from src.services.sweep import power_fit, run_sweep
from src.utils.cfs_io import read_sweep_config, write_fit_summary
from src.utils.csv_output import read_sweep_csv, write_sweep_csv
from src.utils.errors import NumericalError
from src.utils.plotting import plot_sweep_svg


def _eps_list(raw: str) -> List[float]:
    try:
        return [float(item) for item in raw.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid --eps-list {raw!r}: {exc}") from exc


def default_sweep_config() -> SweepConfig:
    return SweepConfig(
        m=SWEEP_MASS,
        eps_list=SWEEP_EPS_LIST,
        box_len=SWEEP_BOX_LEN,
        sigma_mode=SWEEP_SIGMA_MODE,
        quad=QuadSettings(
            order=QUAD_ORDER,
            base_panels=QUAD_BASE_PANELS,
            max_depth=QUAD_MAX_DEPTH,
            target_rel_err=QUAD_TARGET_REL_ERR,
        ),
    )


def resolve_sweep_config(args: argparse.Namespace, threads: int) -> SweepConfig:
    base = read_sweep_config(args.config) if args.config else default_sweep_config()
    overrides = base.model_dump()
    if args.eps_list is not None:
        overrides["eps_list"] = args.eps_list
    if args.box_len is not None:
        overrides["box_len"] = args.box_len
    if args.integrand is not None:
        overrides["integrand"] = args.integrand
    overrides["threads"] = threads
    return SweepConfig.model_validate(overrides)


def _fit_or_none(result: SweepResult) -> Optional[FitResult]:
    try:
        return power_fit(result)
    except NumericalError as exc:
        logger.error("Power fit failed: {}", exc)
        return None


def write_sweep_artifacts(out: Path, result: SweepResult, fit: Optional[FitResult]) -> dict:
    csv_path = write_sweep_csv(result, out / "sweep.csv")
    fit_path = write_fit_summary(out / "fit.json", fit, result)
    svg_path = plot_sweep_svg(result, fit, out / "sweep.svg")
    return {"csv": str(csv_path), "fit_summary": str(fit_path), "plot": str(svg_path)}


def run_sweep_command(args: argparse.Namespace) -> int:
    run = resolve_run_config(args, "sweep", inputs=[args.config] if args.config else [])
    run = run.model_copy(update={"sweep": resolve_sweep_config(args, run.threads)})
    if run.dry_run:
        return print_dry_run(run)
    with WorkScheduler(run.threads) as scheduler:
        result = run_sweep(run.sweep, scheduler)
    fit = _fit_or_none(result)
    artifacts = write_sweep_artifacts(output_dir(run), result, fit)
    emit({"fit": fit, "rows": len(result.rows), **artifacts})
    if fit is None:
        raise NumericalError("sweep finished without a usable power fit")
    logger.info("Sweep exponent b = {:.4f} +- {:.4f}", fit.b, fit.stderr_b)
    return 0


def run_fit(args: argparse.Namespace) -> int:
    run = resolve_run_config(args, "fit", inputs=[args.input])
    if run.dry_run:
        return print_dry_run(run)
    result = read_sweep_csv(args.input)
    fit = power_fit(result)
    out = output_dir(run)
    fit_path = write_fit_summary(out / "fit.json", fit, result)
    svg_path = plot_sweep_svg(result, fit, out / "fit.svg")
    emit({"fit": fit, "fit_summary": str(fit_path), "plot": str(svg_path)})
    return 0


def register(subparsers: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    sweep_parser = subparsers.add_parser(
        "sweep", parents=[parent], help="total-variance sweep over m*eps with power-law fit"
    )
    sweep_parser.add_argument("--config", default=None, help="sweep config document")
    sweep_parser.add_argument(
        "--eps-list", type=_eps_list, default=None, help="comma-separated m*eps values"
    )
    sweep_parser.add_argument("--box-len", type=float, default=None, help="box length m*L")
    sweep_parser.add_argument(
        "--integrand", choices=["variance_density", "lagrangian"], default=None
    )
    sweep_parser.set_defaults(handler=run_sweep_command)

    fit_parser = subparsers.add_parser(
        "fit", parents=[parent], help="power-law fit of an existing sweep CSV"
    )
    fit_parser.add_argument("input", help="sweep CSV")
    fit_parser.set_defaults(handler=run_fit)
