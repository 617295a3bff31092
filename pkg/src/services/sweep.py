"""Total-variance sweep: l_eps over a spacetime box and the power-law fit in m*eps.

The integral runs over the difference vector y - x only, reduced with isotropy to (t, r) and
with the t -> -t symmetry to t >= 0.  In light-cone coordinates u = t - r, v = t + r the
integrand concentrates in |u| of a few eps, so u-panels are linear inside that band and
geometrically graded outside; v-panels are graded away from the apex of the cone.
"""

import math
import time
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from loguru import logger
from numpy.polynomial.legendre import leggauss
from scipy.optimize import curve_fit

from src.config.config import FIT_MIN_ROWS, RECORD_TIMING
from src.models.models import (
    FitResult,
    KernelParams,
    QuadSettings,
    SweepConfig,
    SweepResult,
    SweepRow,
)
from src.services.minkowski import timelike_excess, trace_normalization
from src.services.scheduler import WorkScheduler, pairwise_sum
from src.utils.errors import CFSError, NumericalError, StructuralError

_ALPHA_POWER = {"variance_density": 2, "lagrangian": 4}

Panel = Tuple[float, float]


class LEpsValue(NamedTuple):
    value: float
    est_rel_err: float
    n_evals: int
    converged: bool


def _graded_edges(lo: float, hi: float, panels: int) -> np.ndarray:
    return lo * (hi / lo) ** (np.arange(panels + 1) / panels)


def _linear_edges(lo: float, hi: float, panels: int) -> np.ndarray:
    return np.linspace(lo, hi, panels + 1)


def _gauss_nodes(edges: np.ndarray, order: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(order)
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    nodes = half * x[None, :] + 0.5 * (a + b)
    weights = half * w[None, :]
    return nodes.ravel(), weights.ravel()


def u_panels(box_len: float, band: float, panels: int) -> List[Panel]:
    """Panels in u = t - r covering [-L, L]; linear on |u| <= band, graded outside."""
    if band >= box_len:
        edges = _linear_edges(-box_len, box_len, 2 * panels)
        return list(zip(edges[:-1], edges[1:]))
    outer = _graded_edges(band, box_len, panels)
    edges = np.concatenate([-outer[::-1], _linear_edges(-band, band, panels)[1:-1], outer])
    return list(zip(edges[:-1], edges[1:]))


def v_nodes(u: float, box_len: float, band: float, panels: int, order: int):
    """Gauss nodes in v on [|u|, 2L - |u|]; linear up to 2*band near the apex, graded beyond."""
    lo, hi = abs(u), 2.0 * box_len - abs(u)
    if hi <= lo:
        return np.empty(0), np.empty(0)
    if lo >= band:
        return _gauss_nodes(_graded_edges(lo, hi, panels), order)
    knee = min(2.0 * band, hi)
    nodes, weights = _gauss_nodes(_linear_edges(lo, knee, panels), order)
    if knee < hi:
        far_nodes, far_weights = _gauss_nodes(_graded_edges(knee, hi, panels), order)
        nodes = np.concatenate([nodes, far_nodes])
        weights = np.concatenate([weights, far_weights])
    return nodes, weights


def _chunk_integral(
    chunk: List[Panel],
    *,
    m: float,
    eps: float,
    box_len: float,
    band: float,
    panels: int,
    order: int,
    alpha_power: int,
) -> Tuple[float, int]:
    u_all, wu_all = _gauss_nodes(np.array([chunk[0][0], *[b for _a, b in chunk]]), order)
    t_parts, r_parts, w_parts = [], [], []
    for u, wu in zip(u_all, wu_all):
        v, wv = v_nodes(u, box_len, band, panels, order)
        t_parts.append(0.5 * (u + v))
        r_parts.append(0.5 * (v - u))
        w_parts.append(wu * wv)
    t = np.concatenate(t_parts)
    r = np.concatenate(r_parts)
    w = np.concatenate(w_parts)
    values = timelike_excess(t, r, m, eps, alpha_power) * r * r
    if not np.all(np.isfinite(values)):
        raise NumericalError(
            f"non-finite integrand at eps={eps} for u in [{chunk[0][0]:.3e}, {chunk[-1][1]:.3e}]"
        )
    # 0.5 is the Jacobian of (u, v) -> (t, r)
    return float(np.sum(values * w)) * 0.5, int(t.size)


def _level_integral(
    level: int,
    m: float,
    eps: float,
    box_len: float,
    quad: QuadSettings,
    alpha_power: int,
    scheduler: Optional[WorkScheduler],
) -> Tuple[float, int]:
    panels = quad.base_panels * 2**level
    band = quad.band * eps
    u_list = u_panels(box_len, band, panels)
    chunks = [u_list[i : i + quad.chunk_panels] for i in range(0, len(u_list), quad.chunk_panels)]

    def _work(chunk: List[Panel]) -> Tuple[float, int]:
        return _chunk_integral(
            chunk,
            m=m,
            eps=eps,
            box_len=box_len,
            band=band,
            panels=panels,
            order=quad.order,
            alpha_power=alpha_power,
        )

    partials = scheduler.map_ordered(_work, chunks) if scheduler else [_work(c) for c in chunks]
    return pairwise_sum([p for p, _n in partials]), sum(n for _p, n in partials)


def volume_factor(box_len: float) -> float:
    """sigma = 1 / (2L * (4 pi / 3) L^3), the inverse box volume."""
    return 1.0 / (2.0 * box_len * (4.0 * math.pi / 3.0) * box_len**3)


def l_eps(
    m: float,
    eps: float,
    box_len: float,
    quad: Optional[QuadSettings] = None,
    *,
    integrand: str = "variance_density",
    sigma_mode: bool = False,
    scheduler: Optional[WorkScheduler] = None,
) -> LEpsValue:
    """16 lambda^4 times the integral of |alpha|^2 (X.X - eps^2 r^2)_+ 4 pi r^2 over |t|, r < L."""
    quad = quad or QuadSettings()
    params = KernelParams(m=m, eps=eps)
    if box_len <= 0:
        raise StructuralError(f"box length must be positive, got {box_len}")
    alpha_power = _ALPHA_POWER[integrand]
    lam = trace_normalization(params)
    # 2 for t < 0, 4 pi from the angular integral
    prefactor = 16.0 * lam**4 * 2.0 * 4.0 * math.pi
    if sigma_mode:
        prefactor *= volume_factor(box_len)

    previous: Optional[float] = None
    value, est_rel_err, n_evals = 0.0, math.inf, 0
    for level in range(quad.max_depth + 1):
        raw, count = _level_integral(level, m, eps, box_len, quad, alpha_power, scheduler)
        n_evals += count
        value = prefactor * raw
        if previous is not None:
            est_rel_err = abs(value - previous) / abs(value) if value != 0 else abs(previous)
            logger.debug(
                "l_eps(m*eps={}) level {}: {:.10e} (rel change {:.2e})",
                m * eps,
                level,
                value,
                est_rel_err,
            )
            if est_rel_err <= quad.target_rel_err:
                return LEpsValue(value, est_rel_err, n_evals, True)
        previous = value
    logger.warning(
        "l_eps(m*eps={}) did not reach rel. error {:.1e} (estimate {:.2e})",
        m * eps,
        quad.target_rel_err,
        est_rel_err,
    )
    return LEpsValue(value, est_rel_err, n_evals, False)


def run_sweep(
    cfg: SweepConfig,
    scheduler: Optional[WorkScheduler] = None,
    record_timing: Optional[bool] = None,
) -> SweepResult:
    record_timing = RECORD_TIMING if record_timing is None else record_timing
    owned = scheduler is None and cfg.threads > 1
    if owned:
        scheduler = WorkScheduler(cfg.threads)
    rows: List[SweepRow] = []
    try:
        for m_eps in cfg.eps_list:
            started = time.perf_counter()
            try:
                result = l_eps(
                    cfg.m,
                    m_eps / cfg.m,
                    cfg.box_len / cfg.m,
                    cfg.quad,
                    integrand=cfg.integrand,
                    sigma_mode=cfg.sigma_mode,
                    scheduler=scheduler,
                )
            except (CFSError, ArithmeticError, ValueError) as exc:
                logger.error("Sweep row m*eps={} failed: {}", m_eps, exc)
                rows.append(
                    SweepRow(
                        m_eps=m_eps,
                        l_eps=math.nan,
                        est_rel_err=math.nan,
                        n_evals=0,
                        seconds=0.0,
                        converged=False,
                        error=str(exc),
                    )
                )
                continue
            elapsed = time.perf_counter() - started
            logger.info(
                "m*eps={:.3e}: l_eps={:.6e} (rel err {:.1e}, {} evals, {:.1f}s)",
                m_eps,
                result.value,
                result.est_rel_err,
                result.n_evals,
                elapsed,
            )
            rows.append(
                SweepRow(
                    m_eps=m_eps,
                    l_eps=result.value,
                    est_rel_err=result.est_rel_err,
                    n_evals=result.n_evals,
                    seconds=elapsed if record_timing else 0.0,
                    converged=result.converged,
                )
            )
    finally:
        if owned:
            scheduler.shutdown(wait=True)
    return SweepResult(rows=rows)


def _line(x: np.ndarray, intercept: float, slope: float) -> np.ndarray:
    return intercept + slope * x


def power_fit(res: SweepResult, min_rows: Optional[int] = None) -> FitResult:
    """Least-squares fit of log l_eps = log a + b log(m eps)."""
    min_rows = max(3, FIT_MIN_ROWS if min_rows is None else min_rows)
    usable = [
        row
        for row in res.rows
        if math.isfinite(row.l_eps) and row.l_eps > 0 and row.m_eps > 0
    ]
    excluded = len(res.rows) - len(usable)
    if excluded:
        logger.warning("Excluded {} sweep rows with non-positive or missing values", excluded)
    if len(usable) < min_rows:
        raise NumericalError(
            f"power fit needs at least {min_rows} positive rows, got {len(usable)}"
        )
    x = np.log([row.m_eps for row in usable])
    y = np.log([row.l_eps for row in usable])
    slope0, intercept0 = np.polyfit(x, y, 1)
    popt, pcov = curve_fit(_line, x, y, p0=(intercept0, slope0))
    intercept, slope = float(popt[0]), float(popt[1])
    perr = np.sqrt(np.clip(np.diag(pcov), 0.0, None))
    residuals = y - _line(x, intercept, slope)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(residuals**2)) / ss_tot if ss_tot > 0 else 1.0
    return FitResult(
        a=math.exp(intercept),
        b=slope,
        stderr_b=float(perr[1]),
        stderr_log_a=float(perr[0]),
        r2=r2,
        n_rows=len(usable),
        excluded=excluded,
    )


__all__ = [
    "LEpsValue",
    "l_eps",
    "power_fit",
    "run_sweep",
    "u_panels",
    "v_nodes",
    "volume_factor",
]
