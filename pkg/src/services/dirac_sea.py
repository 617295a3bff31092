"""Box-discretized Dirac sea.

Negative-energy plane waves in a periodic box of side L with momenta k in (2 pi / L) Z^3,
|k| <= k_cut, two spin states each.  For omega = sqrt(|k|^2 + m^2) the spinors in the Dirac
representation are

    chi_{k,s} = sqrt((omega + m) / (2 omega)) (-sigma.k phi_s / (omega + m), phi_s),

and the wave function at (t, x) is chi e^{i omega t + i k.x} / L^{3/2}, optionally damped by
e^{-omega eps_soft / 2}.
"""

import math
from typing import List, Optional

import numpy as np
from loguru import logger

from src.models.models import FourVector, KernelParams, SeaSampleConfig
from src.services.cfs_core import DiscreteCFS, SpacetimePoint, kernel, point_from_psi
from src.services.minkowski import continuum_sea_kernel
from src.services.scheduler import WorkScheduler
from src.utils.errors import ResourceError, StructuralError

_PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


def momentum_lattice(box_len: float, k_cut: float) -> np.ndarray:
    """All k in (2 pi / L) Z^3 with |k| <= k_cut, in lexicographic order of the integer labels."""
    if box_len <= 0 or k_cut <= 0:
        raise StructuralError(f"box_len and k_cut must be positive, got {box_len}, {k_cut}")
    spacing = 2.0 * math.pi / box_len
    n_max = int(math.floor(k_cut / spacing))
    axis = np.arange(-n_max, n_max + 1)
    labels = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
    momenta = spacing * labels
    keep = np.einsum("ij,ij->i", momenta, momenta) <= k_cut * k_cut * (1.0 + 1e-12)
    return momenta[keep]


def count_modes(box_len: float, k_cut: float) -> int:
    return int(momentum_lattice(box_len, k_cut).shape[0])


def sea_spinors(momenta: np.ndarray, m: float) -> np.ndarray:
    """Unit negative-energy spinors, shape (4, 2 * len(momenta)); column 2j + s is (k_j, s)."""
    omega = np.sqrt(np.einsum("ij,ij->i", momenta, momenta) + m * m)
    sigma_k = np.einsum("ia,abc->ibc", momenta, _PAULI)  # (K, 2, 2)
    norm = np.sqrt((omega + m) / (2.0 * omega))
    spinors = np.empty((4, 2 * len(momenta)), dtype=complex)
    for s in range(2):
        upper = -sigma_k[:, :, s] / (omega + m)[:, None]
        lower = np.zeros((len(momenta), 2), dtype=complex)
        lower[:, s] = 1.0
        column = np.concatenate([upper, lower], axis=1) * norm[:, None]
        spinors[:, s::2] = column.T
    return spinors


def _mode_frequencies(momenta: np.ndarray, m: float) -> np.ndarray:
    omega = np.sqrt(np.einsum("ij,ij->i", momenta, momenta) + m * m)
    return np.repeat(omega, 2)


def _wave_matrix(
    point: FourVector,
    spinors: np.ndarray,
    momenta2: np.ndarray,
    omega2: np.ndarray,
    box_len: float,
    eps_soft: Optional[float],
) -> np.ndarray:
    phase = np.exp(1j * (omega2 * point.t + momenta2 @ point.spatial()))
    amplitude = np.full(omega2.shape, box_len**-1.5)
    if eps_soft is not None:
        amplitude = amplitude * np.exp(-0.5 * omega2 * eps_soft)
    return spinors * (phase * amplitude)[None, :]


def dirac_sea_sample(
    cfg: SeaSampleConfig, scheduler: Optional[WorkScheduler] = None
) -> DiscreteCFS:
    momenta = momentum_lattice(cfg.box_len, cfg.k_cut)
    n_modes = 2 * len(momenta)
    if n_modes == 0:
        raise StructuralError("momentum cutoff leaves no modes")
    estimate = len(cfg.lattice) * n_modes
    if estimate > cfg.budget:
        raise ResourceError(
            f"sea sample needs {len(cfg.lattice)} points x {n_modes} modes = {estimate} "
            f"wave evaluations, above the budget of {cfg.budget}",
            estimate=estimate,
            budget=cfg.budget,
        )
    logger.info(
        "Sampling Dirac sea: L={}, k_cut={}, {} modes at {} lattice points",
        cfg.box_len,
        cfg.k_cut,
        n_modes,
        len(cfg.lattice),
    )
    spinors = sea_spinors(momenta, cfg.m)
    momenta2 = np.repeat(momenta, 2, axis=0)
    omega2 = _mode_frequencies(momenta, cfg.m)

    def _point(x: FourVector) -> SpacetimePoint:
        psi = _wave_matrix(x, spinors, momenta2, omega2, cfg.box_len, cfg.eps_soft)
        return point_from_psi(psi, 2)

    if scheduler is None:
        points = [_point(x) for x in cfg.lattice]
    else:
        points = scheduler.map_ordered(_point, cfg.lattice)
    weights = np.full(len(points), 1.0 / len(points))
    return DiscreteCFS(points=tuple(points), weights=weights)


def sampled_kernel_deviation(
    cfg: SeaSampleConfig,
    x_idx: int,
    y_idx: int,
    params: Optional[KernelParams] = None,
    cfs: Optional[DiscreteCFS] = None,
) -> float:
    """Frobenius norm of the sampled minus the continuum kernel between two lattice points.

    The continuum kernel uses ``params.eps`` (default ``cfg.eps_soft``) as regularization.
    """
    cfs = cfs or dirac_sea_sample(cfg)
    x_idx, y_idx = cfs.check_index(x_idx), cfs.check_index(y_idx)
    if params is None:
        if cfg.eps_soft is None:
            raise StructuralError("continuum comparison needs eps_soft or explicit kernel params")
        params = KernelParams(m=cfg.m, eps=cfg.eps_soft)
    sampled = kernel(cfs.points[x_idx], cfs.points[y_idx])
    continuum = continuum_sea_kernel(cfg.lattice[x_idx], cfg.lattice[y_idx], params)
    return float(np.linalg.norm(sampled - continuum))


def rank_statistics(cfs: DiscreteCFS) -> List[int]:
    """Numerical rank of each wave evaluation (at most 2n)."""
    return [int(np.linalg.matrix_rank(p.psi)) for p in cfs.points]


__all__ = [
    "count_modes",
    "dirac_sea_sample",
    "momentum_lattice",
    "rank_statistics",
    "sampled_kernel_deviation",
    "sea_spinors",
]
