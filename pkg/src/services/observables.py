"""Position observables, one-particle measures, localization and correlation strengths.

The physical wave function of a state u at x is taken as its projection onto the spin space,
``psi^u(x) = pi_x u``; the one-particle measure of a region is then
``(1/2n) sum_i w_i <u|pi_{x_i} u>``, which sums to the total expectation over any basis.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence

import numpy as np
from loguru import logger

from src.models.models import CausalClass, Tolerances
from src.services.cfs_core import (
    DiscreteCFS,
    ProductSpectrum,
    SpacetimePoint,
    classify,
    is_hermitian,
    kernel,
    pair_spectra,
    product_spectrum,
    spin_adjoint,
    spin_projection,
)
from src.services.scheduler import pairwise_sum
from src.utils.errors import StructuralError

_ORTHONORMAL_TOL = 1e-12
_UNIT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Subsystem:
    basis: np.ndarray  # (k, N), rows orthonormal
    omega: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        basis = np.array(self.basis, dtype=complex)
        if basis.ndim != 2:
            raise StructuralError(f"subsystem basis must be a (k, N) array, got {basis.shape}")
        gram = basis.conj() @ basis.T
        if basis.shape[0] and not np.allclose(gram, np.eye(basis.shape[0]), atol=_ORTHONORMAL_TOL):
            raise StructuralError("subsystem basis vectors are not orthonormal")
        omega = basis.T @ basis.conj()
        basis.flags.writeable = False
        omega.flags.writeable = False
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "omega", omega)

    @property
    def N(self) -> int:
        return self.basis.shape[1]

    @property
    def particle_number(self) -> int:
        return self.basis.shape[0]


@dataclass(frozen=True)
class Region:
    indices: FrozenSet[int]

    @classmethod
    def of(cls, indices: Iterable[int]) -> "Region":
        return cls(indices=frozenset(int(i) for i in indices))

    def validate(self, cfs: DiscreteCFS) -> "Region":
        bad = sorted(i for i in self.indices if not 0 <= i < len(cfs))
        if bad:
            raise StructuralError(f"region indices {bad} out of range for {len(cfs)} points")
        return self

    def sorted(self) -> List[int]:
        return sorted(self.indices)


def subsystem_from_vectors(vectors: Sequence[Sequence[complex]]) -> Subsystem:
    """Orthonormal basis of the span of ``vectors`` (rows), from the right singular vectors."""
    matrix = np.atleast_2d(np.asarray(vectors, dtype=complex))
    if matrix.size == 0:
        raise StructuralError("a subsystem needs at least one vector")
    _, singular, vh = np.linalg.svd(matrix, full_matrices=False)
    keep = singular > _ORTHONORMAL_TOL * max(float(singular.max(initial=0.0)), 1.0)
    if not np.all(keep):
        logger.warning("Dropped {} linearly dependent subsystem vectors", int((~keep).sum()))
    return Subsystem(basis=vh[keep])


def total_system(N: int) -> Subsystem:
    return Subsystem(basis=np.eye(N, dtype=complex))


def _unit(u: Sequence[complex], N: Optional[int] = None) -> np.ndarray:
    u = np.asarray(u, dtype=complex).ravel()
    if abs(np.linalg.norm(u) - 1.0) > _UNIT_TOL:
        raise StructuralError(f"state must be normalized, got norm {np.linalg.norm(u):.15g}")
    if N is not None and u.size != N:
        raise StructuralError(f"state has dimension {u.size}, expected {N}")
    return u


# --- position observables --------------------------------------------------------------


class ProjectionCache:
    """Spin projections of the points of one CFS, computed on first use."""

    def __init__(self, cfs: DiscreteCFS):
        self.cfs = cfs
        self._cache: Dict[int, np.ndarray] = {}

    def __call__(self, idx: int) -> np.ndarray:
        if idx not in self._cache:
            self._cache[idx] = spin_projection(self.cfs.points[idx], self.cfs.tol)
        return self._cache[idx]


def position_observable(
    cfs: DiscreteCFS, reg: Region, projections: Optional[ProjectionCache] = None
) -> np.ndarray:
    reg.validate(cfs)
    projections = projections or ProjectionCache(cfs)
    observable = np.zeros((cfs.N, cfs.N), dtype=complex)
    for i in reg.sorted():
        observable += cfs.weights[i] * projections(i)
    return observable


def expectation(
    omega: Subsystem, O: np.ndarray, n: int, tol: Optional[Tolerances] = None
) -> float:
    tol = tol or Tolerances()
    O = np.asarray(O, dtype=complex)
    if O.shape != omega.omega.shape:
        raise StructuralError(
            f"observable shape {O.shape} does not match subsystem dimension {omega.N}"
        )
    if not is_hermitian(O, tol.tol_herm):
        logger.warning("Expectation of a non-Hermitian operator; returning the real part")
    value = np.trace(omega.omega @ O) / (2.0 * n)
    return float(value.real)


def occupation(u: Sequence[complex], omega: Subsystem) -> float:
    """<u|omega u>; a longer vector is read as zero-padded beyond the physical block."""
    u = _unit(u)
    if u.size < omega.N:
        raise StructuralError(f"state has dimension {u.size} < subsystem dimension {omega.N}")
    physical = u[: omega.N]
    return float(np.vdot(physical, omega.omega @ physical).real)


def _measure_densities(
    cfs: DiscreteCFS, u: np.ndarray, projections: ProjectionCache
) -> np.ndarray:
    """w_i <u|pi_i u> / 2n for every point."""
    return np.array(
        [
            cfs.weights[i] * float(np.vdot(u, projections(i) @ u).real) / (2.0 * cfs.n)
            for i in range(len(cfs))
        ]
    )


def wave_function(cfs: DiscreteCFS, u: Sequence[complex], idx: int) -> np.ndarray:
    """psi^u(x_idx) in the spinor frame of the point: psi_x @ u (2n components)."""
    idx = cfs.check_index(idx)
    u = np.asarray(u, dtype=complex).ravel()
    return cfs.points[idx].psi @ u


def one_particle_measure(
    cfs: DiscreteCFS,
    u: Sequence[complex],
    reg: Region,
    projections: Optional[ProjectionCache] = None,
) -> float:
    reg.validate(cfs)
    u = _unit(u, cfs.N)
    projections = projections or ProjectionCache(cfs)
    densities = _measure_densities(cfs, u, projections)
    return pairwise_sum([densities[i] for i in reg.sorted()])


def one_particle_support(
    cfs: DiscreteCFS,
    u: Sequence[complex],
    tol: Optional[Tolerances] = None,
    projections: Optional[ProjectionCache] = None,
) -> Region:
    tol = tol or cfs.tol
    u = _unit(u, cfs.N)
    projections = projections or ProjectionCache(cfs)
    densities = _measure_densities(cfs, u, projections)
    peak = float(densities.max(initial=0.0))
    if peak <= 0.0:
        return Region.of([])
    return Region.of(np.flatnonzero(densities > tol.tol_rank * peak).tolist())


def is_localized(
    cfs: DiscreteCFS,
    u: Sequence[complex],
    reg: Region,
    spectra: Optional[List[List[ProductSpectrum]]] = None,
) -> bool:
    """Every support point of u is timelike or lightlike to some point of ``reg``."""
    reg.validate(cfs)
    support = one_particle_support(cfs, u)
    if not support.indices:
        return True
    if not reg.indices:
        return False

    def _related(i: int, j: int) -> bool:
        spec = spectra[i][j] if spectra is not None else product_spectrum(
            cfs.points[i], cfs.points[j]
        )
        return classify(spec, cfs.tol) is not CausalClass.SPACELIKE

    return all(any(_related(i, j) for j in reg.sorted()) for i in support.sorted())


def is_delocalized(cfs: DiscreteCFS, u: Sequence[complex]) -> bool:
    return one_particle_support(cfs, u).indices == frozenset(range(len(cfs)))


# --- information transfer and correlations ----------------------------------------------


def transfer_retained(
    u: Sequence[complex], x: SpacetimePoint, y: SpacetimePoint, O_y: np.ndarray
) -> np.ndarray:
    """|psi^u(x)> <psi^u(y)| O_y |psi^u(y)> <psi^u(x)| in the spinor frame of x.

    Bras are spin adjoints: <phi| acts as phi^dagger S.  The result has rank at most 1.
    """
    u = np.asarray(u, dtype=complex).ravel()
    if u.size != x.N or x.N != y.N:
        raise StructuralError(f"state of dimension {u.size} for points with N = {x.N}, {y.N}")
    O_y = np.asarray(O_y, dtype=complex)
    if O_y.shape != (2 * y.n, 2 * y.n):
        raise StructuralError(f"O_y must be {2 * y.n}x{2 * y.n}, got {O_y.shape}")
    psi_x = x.psi @ u
    psi_y = y.psi @ u
    s_x, s_y = x.sig.diagonal, y.sig.diagonal
    retained = np.vdot(psi_y, s_y * (O_y @ psi_y))
    return retained * np.outer(psi_x, psi_x.conj() * s_x)


def causal_correlation_operator(
    cfs: DiscreteCFS, i: int, j: int, spec: Optional[ProductSpectrum] = None
) -> np.ndarray:
    """Causal correlation operator ``y x pi_x`` of the pair (x_i, x_j), zero for spacelike pairs.

    The outer ``pi_x`` of ``pi_x y x pi_x`` is left off, so the image lies in S_y. Only this
    form gives ``conj(b_u(x, y)) == b_u(y, x)`` for every u; the trace and the nonzero
    eigenvalues agree with the closed chain either way.
    """
    i, j = cfs.check_index(i), cfs.check_index(j)
    x, y = cfs.points[i], cfs.points[j]
    spec = spec or product_spectrum(x, y)
    if classify(spec, cfs.tol) is CausalClass.SPACELIKE:
        return np.zeros((cfs.N, cfs.N), dtype=complex)
    return y.dense() @ x.dense() @ spin_projection(x, cfs.tol)


def correlation_strength_one(cfs: DiscreteCFS, u: Sequence[complex], i: int, j: int) -> complex:
    u = _unit(u, cfs.N)
    operator = causal_correlation_operator(cfs, i, j)
    return complex(np.vdot(u, operator @ u) / (2.0 * cfs.n))


def correlation_strength_total(
    cfs: DiscreteCFS, i: int, j: int, spec: Optional[ProductSpectrum] = None
) -> float:
    operator = causal_correlation_operator(cfs, i, j, spec)
    value = np.trace(operator) / (2.0 * cfs.n)
    if abs(value.imag) > 1e-10 * abs(value.real) + 1e-14:
        logger.warning(
            "Total correlation strength ({}, {}) has imaginary part {:.3e}", i, j, value.imag
        )
    return float(value.real)


def correlation_matrix(
    cfs: DiscreteCFS, spectra: Optional[List[List[ProductSpectrum]]] = None
) -> np.ndarray:
    spectra = spectra or pair_spectra(cfs)
    size = len(cfs)
    table = np.zeros((size, size))
    for i in range(size):
        for j in range(size):
            table[i, j] = correlation_strength_total(cfs, i, j, spectra[i][j])
    return table


def kernel_spin_adjoint_defect(x: SpacetimePoint, y: SpacetimePoint) -> float:
    """max |P(x,y)* - P(y,x)|; zero up to rounding."""
    return float(np.max(np.abs(spin_adjoint(kernel(x, y), x.sig) - kernel(y, x))))


__all__ = [
    "ProjectionCache",
    "Region",
    "Subsystem",
    "causal_correlation_operator",
    "correlation_matrix",
    "correlation_strength_one",
    "correlation_strength_total",
    "expectation",
    "is_delocalized",
    "is_localized",
    "kernel_spin_adjoint_defect",
    "occupation",
    "one_particle_measure",
    "one_particle_support",
    "position_observable",
    "subsystem_from_vectors",
    "total_system",
    "transfer_retained",
    "wave_function",
]
