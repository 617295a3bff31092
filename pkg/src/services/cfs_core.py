"""Finite-dimensional causal fermion systems.

A spacetime point is stored through its wave evaluation ``psi`` (2n x N): the operator on the
N-dimensional Hilbert space is ``x = -psi^dagger S psi`` with ``S = diag(1_n, -1_n)``.  All
spectra are computed on the 2n x 2n closed chain instead of the N x N product.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from src.models.models import ActionReport, CausalClass, ELParams, Tolerances
from src.services.scheduler import WorkScheduler, pairwise_sum, pairwise_sum_array
from src.utils.errors import NumericalError, StructuralError


@dataclass(frozen=True)
class SpinSignature:
    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise StructuralError(f"spin dimension must be a positive integer, got {self.n!r}")

    @property
    def diagonal(self) -> np.ndarray:
        return np.concatenate([np.ones(self.n), -np.ones(self.n)])

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.diagonal).astype(complex)


@dataclass(frozen=True, eq=False)
class WaveEval:
    """Column j holds the wave function of basis state u_j evaluated at one point."""

    psi: np.ndarray

    def __post_init__(self) -> None:
        psi = np.array(self.psi, dtype=complex)
        if psi.ndim != 2:
            raise StructuralError(f"wave evaluation must be a matrix, got shape {psi.shape}")
        rows, cols = psi.shape
        if rows < 2 or rows % 2 or cols < 1:
            raise StructuralError(f"wave evaluation must be 2n x N with n, N >= 1, got {psi.shape}")
        if not np.all(np.isfinite(psi)):
            raise StructuralError("wave evaluation contains non-finite entries")
        psi.flags.writeable = False
        object.__setattr__(self, "psi", psi)

    @property
    def n(self) -> int:
        return self.psi.shape[0] // 2

    @property
    def N(self) -> int:
        return self.psi.shape[1]


@dataclass(frozen=True, eq=False)
class SpacetimePoint:
    eval: WaveEval
    sig: SpinSignature
    _dense: Optional[np.ndarray] = field(default=None, init=False, repr=False)

    def __post_init__(self) -> None:
        if self.eval.n != self.sig.n:
            raise StructuralError(
                f"wave evaluation has {2 * self.eval.n} rows but spin dimension is {self.sig.n}"
            )

    @property
    def psi(self) -> np.ndarray:
        return self.eval.psi

    @property
    def n(self) -> int:
        return self.sig.n

    @property
    def N(self) -> int:
        return self.eval.N

    def dense(self) -> np.ndarray:
        if self._dense is None:
            weighted = self.sig.diagonal[:, None] * self.psi
            dense = -(self.psi.conj().T @ weighted)
            dense = 0.5 * (dense + dense.conj().T)
            dense.flags.writeable = False
            object.__setattr__(self, "_dense", dense)
        return self._dense

    def trace(self) -> float:
        """tr x = -sum_r S_rr |psi_r|^2, without materializing x."""
        return float(-np.sum(self.sig.diagonal * np.sum(np.abs(self.psi) ** 2, axis=1)))


@dataclass(frozen=True, eq=False)
class ProductSpectrum:
    lambdas: np.ndarray
    n: int

    def __post_init__(self) -> None:
        lambdas = np.asarray(self.lambdas, dtype=complex).ravel()
        if lambdas.size != 2 * self.n:
            raise StructuralError(
                f"product spectrum needs exactly {2 * self.n} entries, got {lambdas.size}"
            )
        lambdas.flags.writeable = False
        object.__setattr__(self, "lambdas", lambdas)

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.lambdas)

    @classmethod
    def of(cls, values: Sequence[complex]) -> "ProductSpectrum":
        values = list(values)
        return cls(lambdas=np.asarray(values, dtype=complex), n=len(values) // 2)


@dataclass(frozen=True, eq=False)
class DiscreteCFS:
    points: Tuple[SpacetimePoint, ...]
    weights: np.ndarray
    tol: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self) -> None:
        points = tuple(self.points)
        weights = np.array(self.weights, dtype=float).ravel()
        if not points:
            raise StructuralError("a discrete CFS needs at least one spacetime point")
        if weights.size != len(points):
            raise StructuralError(f"{weights.size} weights given for {len(points)} points")
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
            raise StructuralError("measure weights must be finite and strictly positive")
        n, N = points[0].n, points[0].N
        for index, point in enumerate(points):
            if point.n != n or point.N != N:
                raise StructuralError(
                    f"point {index} has (n, N) = ({point.n}, {point.N}), expected ({n}, {N})"
                )
        weights.flags.writeable = False
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @property
    def n(self) -> int:
        return self.points[0].n

    @property
    def N(self) -> int:
        return self.points[0].N

    def __len__(self) -> int:
        return len(self.points)

    def check_index(self, idx: int) -> int:
        if not isinstance(idx, (int, np.integer)) or not 0 <= idx < len(self.points):
            raise StructuralError(f"point index {idx!r} out of range for {len(self.points)} points")
        return int(idx)

    def with_weights(self, weights: Sequence[float]) -> "DiscreteCFS":
        return DiscreteCFS(points=self.points, weights=np.asarray(weights), tol=self.tol)


# --- construction --------------------------------------------------------------------


def point_from_wave_eval(eval: WaveEval, sig: SpinSignature) -> SpacetimePoint:
    return SpacetimePoint(eval=eval, sig=sig)


def point_from_psi(psi: np.ndarray, n: Optional[int] = None) -> SpacetimePoint:
    wave = WaveEval(psi=psi)
    return point_from_wave_eval(wave, SpinSignature(n if n is not None else wave.n))


def dense_operator(p: SpacetimePoint) -> np.ndarray:
    return p.dense()


def is_hermitian(matrix: np.ndarray, tol: float) -> bool:
    matrix = np.asarray(matrix)
    scale = max(1.0, float(np.max(np.abs(matrix)))) if matrix.size else 1.0
    return bool(np.max(np.abs(matrix - matrix.conj().T), initial=0.0) <= tol * scale)


def _same_shape(x: SpacetimePoint, y: SpacetimePoint) -> None:
    if x.n != y.n or x.N != y.N:
        raise StructuralError(
            f"points disagree in dimensions: (n, N) = ({x.n}, {x.N}) vs ({y.n}, {y.N})"
        )


# --- kernel and spectra ----------------------------------------------------------------


def kernel(x: SpacetimePoint, y: SpacetimePoint) -> np.ndarray:
    """P(x, y) = -psi_x psi_y^dagger S, the spinor matrix of sum_i |psi_i(x)><psi_i(y)|.

    Its spin adjoint S P^dagger S equals P(y, x).
    """
    _same_shape(x, y)
    return -(x.psi @ y.psi.conj().T) * x.sig.diagonal[None, :]


def spin_adjoint(matrix: np.ndarray, sig: SpinSignature) -> np.ndarray:
    d = sig.diagonal
    return d[:, None] * np.asarray(matrix).conj().T * d[None, :]


def closed_chain(x: SpacetimePoint, y: SpacetimePoint) -> np.ndarray:
    return kernel(x, y) @ kernel(y, x)


def product_spectrum(x: SpacetimePoint, y: SpacetimePoint) -> ProductSpectrum:
    chain = closed_chain(x, y)
    if not np.all(np.isfinite(chain)):
        raise NumericalError(
            f"closed chain of shape {chain.shape} has non-finite entries "
            f"(max |entry| {np.nanmax(np.abs(chain)):.3e})"
        )
    try:
        lambdas = np.linalg.eigvals(chain)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"eigenvalue solver failed on a {chain.shape[0]}x{chain.shape[1]} closed chain "
            f"with norm {np.linalg.norm(chain):.3e}: {exc}"
        ) from exc
    order = np.lexsort((lambdas.imag, lambdas.real, np.abs(lambdas)))
    return ProductSpectrum(lambdas=lambdas[order], n=x.n)


def classify(spec: ProductSpectrum, tol: Optional[Tolerances] = None) -> CausalClass:
    """Spacelike is tested before timelike; tolerances scale with the spectral radius."""
    tol = tol or Tolerances()
    moduli = spec.moduli
    radius = float(moduli.max(initial=0.0))
    if radius == 0.0:
        return CausalClass.SPACELIKE
    if float(moduli.max() - moduli.min()) <= tol.rel_eq * radius:
        return CausalClass.SPACELIKE
    if float(np.max(np.abs(spec.lambdas.imag))) <= tol.rel_real * radius:
        return CausalClass.TIMELIKE
    return CausalClass.LIGHTLIKE


def lagrangian(
    spec: ProductSpectrum, n: Optional[int] = None, tol: Optional[Tolerances] = None
) -> float:
    if classify(spec, tol) is CausalClass.SPACELIKE:
        return 0.0
    n = n if n is not None else spec.n
    moduli = spec.moduli
    diffs = moduli[:, None] - moduli[None, :]
    return float(np.sum(diffs**2) / (4.0 * n))


def boundedness_integrand(spec: ProductSpectrum) -> float:
    return float(np.sum(spec.moduli) ** 2)


# --- functionals on a discrete measure ---------------------------------------------------


def pair_spectra(
    cfs: DiscreteCFS, scheduler: Optional[WorkScheduler] = None
) -> List[List[ProductSpectrum]]:
    """Spectra of all ordered pairs (i, j), one scheduled chunk per row."""

    def _row(i: int) -> List[ProductSpectrum]:
        return [product_spectrum(cfs.points[i], y) for y in cfs.points]

    rows = range(len(cfs))
    if scheduler is None:
        return [_row(i) for i in rows]
    return scheduler.map_ordered(_row, rows)


def causal_matrix(
    cfs: DiscreteCFS, spectra: Optional[List[List[ProductSpectrum]]] = None
) -> List[List[CausalClass]]:
    spectra = spectra or pair_spectra(cfs)
    return [[classify(spec, cfs.tol) for spec in row] for row in spectra]


def _pair_tables(
    cfs: DiscreteCFS, spectra: Optional[List[List[ProductSpectrum]]]
) -> Tuple[np.ndarray, np.ndarray]:
    spectra = spectra or pair_spectra(cfs)
    lagr = np.array([[lagrangian(s, cfs.n, cfs.tol) for s in row] for row in spectra])
    bound = np.array([[boundedness_integrand(s) for s in row] for row in spectra])
    return lagr, bound


def action(
    cfs: DiscreteCFS,
    spectra: Optional[List[List[ProductSpectrum]]] = None,
    scheduler: Optional[WorkScheduler] = None,
) -> ActionReport:
    """Causal action and constraint functionals; the diagonal i = j is part of the double sum."""
    if spectra is None:
        spectra = pair_spectra(cfs, scheduler)
    lagr, bound = _pair_tables(cfs, spectra)
    w = cfs.weights
    ww = np.outer(w, w)
    report = ActionReport(
        action=pairwise_sum_array(ww * lagr),
        volume=pairwise_sum(w.tolist()),
        trace=pairwise_sum([wi * p.trace() for wi, p in zip(w, cfs.points)]),
        boundedness=pairwise_sum_array(ww * bound),
    )
    logger.debug(
        "Action over {} points: S = {:.6e}, volume = {:.6e}", len(cfs), report.action, report.volume
    )
    return report


def el_function(
    cfs: DiscreteCFS,
    idx: int,
    params: ELParams,
    spectra: Optional[List[List[ProductSpectrum]]] = None,
) -> float:
    idx = cfs.check_index(idx)
    row = spectra[idx] if spectra is not None else [
        product_spectrum(cfs.points[idx], y) for y in cfs.points
    ]
    w = cfs.weights
    lagr = pairwise_sum([wj * lagrangian(s, cfs.n, cfs.tol) for wj, s in zip(w, row)])
    bound = pairwise_sum([wj * boundedness_integrand(s) for wj, s in zip(w, row)])
    return lagr + params.kappa * bound - params.r_tr * cfs.points[idx].trace() - params.s_vol


def el_residuals(
    cfs: DiscreteCFS,
    params: ELParams,
    spectra: Optional[List[List[ProductSpectrum]]] = None,
) -> np.ndarray:
    spectra = spectra or pair_spectra(cfs)
    return np.array([el_function(cfs, i, params, spectra) for i in range(len(cfs))])


def fit_volume_multiplier(
    cfs: DiscreteCFS,
    params: ELParams,
    spectra: Optional[List[List[ProductSpectrum]]] = None,
) -> float:
    """The volume multiplier making the weighted mean of l(x) over the support vanish."""
    unshifted = ELParams(kappa=params.kappa, r_tr=params.r_tr, s_vol=0.0)
    residuals = el_residuals(cfs, unshifted, spectra)
    w = cfs.weights
    return pairwise_sum((w * residuals).tolist()) / pairwise_sum(w.tolist())


# --- spectral data of single points --------------------------------------------------------


def _eigh(p: SpacetimePoint) -> Tuple[np.ndarray, np.ndarray]:
    try:
        return np.linalg.eigh(p.dense())
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"Hermitian eigensolver failed for an {p.N}x{p.N} point: {exc}"
        ) from exc


def _rank_cutoff(values: np.ndarray, tol: Tolerances) -> float:
    return tol.tol_rank * float(np.max(np.abs(values), initial=0.0))


def spin_projection(p: SpacetimePoint, tol: Optional[Tolerances] = None) -> np.ndarray:
    """Orthogonal projector onto the spin space S_x (range of x above the rank cutoff)."""
    tol = tol or Tolerances()
    values, vectors = _eigh(p)
    radius = float(np.max(np.abs(values), initial=0.0))
    if radius == 0.0:
        return np.zeros((p.N, p.N), dtype=complex)
    keep = np.abs(values) > tol.tol_rank * radius
    basis = vectors[:, keep]
    projector = basis @ basis.conj().T
    if keep.sum() > 2 * p.n:
        logger.warning(
            "Point has numerical rank {} above 2n = {}; check tol_rank", int(keep.sum()), 2 * p.n
        )
    return projector


def signature_counts(p: SpacetimePoint, tol: Optional[Tolerances] = None) -> Tuple[int, int]:
    tol = tol or Tolerances()
    values, _ = _eigh(p)
    cutoff = _rank_cutoff(values, tol)
    if cutoff == 0.0:
        return 0, 0
    return int(np.sum(values > cutoff)), int(np.sum(values < -cutoff))


def is_regular(p: SpacetimePoint, tol: Optional[Tolerances] = None) -> bool:
    return signature_counts(p, tol) == (p.n, p.n)


# --- factories ---------------------------------------------------------------------------


def random_psi(
    rng: np.random.Generator, n: int, N: int, rank: Optional[int] = None
) -> np.ndarray:
    psi = rng.standard_normal((2 * n, N)) + 1j * rng.standard_normal((2 * n, N))
    if rank is not None:
        if not 0 <= rank <= 2 * n:
            raise StructuralError(f"rank must lie in [0, {2 * n}], got {rank}")
        psi[rank:, :] = 0.0
    return psi


def random_cfs(
    rng: np.random.Generator,
    n: int,
    N: int,
    n_points: int,
    rank: Optional[int] = None,
    tol: Optional[Tolerances] = None,
) -> DiscreteCFS:
    """Random instance with Gaussian wave evaluations and weights in [0.5, 1.5)."""
    points = tuple(point_from_psi(random_psi(rng, n, N, rank), n) for _ in range(n_points))
    weights = rng.uniform(0.5, 1.5, size=n_points)
    return DiscreteCFS(points=points, weights=weights, tol=tol or Tolerances())


__all__ = [
    "DiscreteCFS",
    "ProductSpectrum",
    "SpacetimePoint",
    "SpinSignature",
    "WaveEval",
    "action",
    "boundedness_integrand",
    "causal_matrix",
    "classify",
    "closed_chain",
    "dense_operator",
    "el_function",
    "el_residuals",
    "fit_volume_multiplier",
    "is_hermitian",
    "is_regular",
    "kernel",
    "lagrangian",
    "pair_spectra",
    "point_from_psi",
    "point_from_wave_eval",
    "product_spectrum",
    "random_cfs",
    "random_psi",
    "signature_counts",
    "spin_adjoint",
    "spin_projection",
]
