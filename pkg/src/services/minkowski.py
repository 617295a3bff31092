"""Regularized Minkowski vacuum kernel.

With ``xi = (t - i eps, dx)``, ``t = y^0 - x^0`` and ``z = m sqrt(-xi.xi)`` on the principal
branch, the kernel is ``P(x, y) = i alpha xi-slash + beta`` with

    alpha = m^4 K_2(z) / (8 pi^3 z^2),    beta = m^3 K_1(z) / (8 pi^3 z).

The closed chain ``P(x, y) P(y, x)`` is ``b + a_mu gamma^mu + c_{0i} Sigma_{0i}`` where, for
``X^mu = Im[(beta/alpha) conj(xi^mu)]``,

    b = |alpha|^2 (t^2 - r^2 + eps^2 + |beta/alpha|^2),   a^mu = 2 |alpha|^2 X^mu,
    c_{0i} = -2 |alpha|^2 eps dx_i   (coefficient of the lowered generator Sigma_{0i}).

Its eigenvalues are ``b +- sqrt(D)`` (each twice) with ``D = 4 |alpha|^4 (X.X - eps^2 r^2)``.
"""

import cmath
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple

import numpy as np
from loguru import logger
from scipy import special

from src.models.models import CausalClass, FourVector, KernelParams, Tolerances
from src.services.cfs_core import ProductSpectrum, classify, lagrangian
from src.services.gamma import GammaBasis, dirac_basis
from src.utils.errors import BesselDomainError, BranchCutError, StructuralError

_EIGHT_PI_CUBED = 8.0 * math.pi**3


class BesselValue(NamedTuple):
    value: complex
    underflow: bool = False


@dataclass(frozen=True, eq=False)
class KernelValue:
    xi: np.ndarray  # contravariant, complex
    z: complex
    alpha: complex
    beta: complex
    underflow: bool = False

    @property
    def t(self) -> float:
        return float(self.xi[0].real)

    @property
    def r(self) -> float:
        return float(np.linalg.norm(self.xi[1:].real))

    @property
    def eps(self) -> float:
        return float(-self.xi[0].imag)


@dataclass(frozen=True, eq=False)
class ChainCoeffs:
    b: float
    a_mu: np.ndarray  # contravariant
    c_0i: np.ndarray
    X_mu: np.ndarray  # contravariant
    r: float
    eps: float
    alpha_sq: float
    degenerate: bool = False

    @property
    def X_dot_X(self) -> float:
        return float(self.X_mu[0] ** 2 - np.dot(self.X_mu[1:], self.X_mu[1:]))

    @property
    def boundary(self) -> float:
        """eps^2 r^2, the value of X.X on the light-cone boundary of the regularized chain."""
        return self.eps**2 * self.r**2

    @property
    def discriminant(self) -> float:
        return 4.0 * self.alpha_sq**2 * (self.X_dot_X - self.boundary)


class ChainEigenvalues(NamedTuple):
    lambda_plus: complex
    lambda_minus: complex
    complex_pair: bool = False

    def spectrum(self) -> ProductSpectrum:
        return ProductSpectrum.of(
            [self.lambda_plus, self.lambda_plus, self.lambda_minus, self.lambda_minus]
        )


# --- Bessel functions --------------------------------------------------------------------


def _check_bessel_arg(z: complex) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise BesselDomainError(f"Bessel argument must be finite, got {z}")
    if z == 0:
        raise BesselDomainError("K_nu is singular at z = 0")
    if z.real < 0:
        raise BesselDomainError(f"Bessel argument {z} lies off the principal half-plane Re z >= 0")
    return z


def bessel_k_scaled(nu: int, z: complex) -> complex:
    """exp(z) K_nu(z) for nu in {0, 1, 2}; K_2 from the recurrence K_2 = K_0 + 2 K_1 / z."""
    z = _check_bessel_arg(z)
    if nu in (0, 1):
        return complex(special.kve(nu, z))
    if nu == 2:
        return complex(special.kve(0, z)) + 2.0 * complex(special.kve(1, z)) / z
    raise StructuralError(f"bessel_k supports orders 0, 1, 2, got {nu}")


def bessel_k(nu: int, z: complex) -> BesselValue:
    """K_nu(z) on the principal branch, flagging exponential underflow for large Re z."""
    scaled = bessel_k_scaled(nu, z)
    z = complex(z)
    decay = math.exp(-z.real)
    if decay == 0.0 and scaled != 0:
        logger.debug("K_{}({}) underflows to zero", nu, z)
        return BesselValue(0j, True)
    value = scaled * decay * complex(math.cos(z.imag), -math.sin(z.imag))
    return BesselValue(value, value == 0 and scaled != 0)


# --- kernel scalars -------------------------------------------------------------------


def separation(x: FourVector, y: FourVector) -> Tuple[float, np.ndarray]:
    return y.t - x.t, y.spatial() - x.spatial()


def complex_xi(x: FourVector, y: FourVector, eps: float) -> np.ndarray:
    t, dx = separation(x, y)
    return np.array([complex(t, -eps), *dx], dtype=complex)


def z_arg(x: FourVector, y: FourVector, params: KernelParams) -> complex:
    t, dx = separation(x, y)
    r_sq = float(np.dot(dx, dx))
    eps = params.eps
    if eps == 0.0 and t * t >= r_sq:
        raise BranchCutError(
            f"separation (t={t}, r={math.sqrt(r_sq)}) is not spacelike; "
            "evaluate with eps > 0 and take the limit"
        )
    minus_xi_sq = complex(r_sq - t * t + eps * eps, 2.0 * t * eps)
    return params.m * cmath.sqrt(minus_xi_sq)


def alpha_beta(x: FourVector, y: FourVector, params: KernelParams) -> KernelValue:
    z = z_arg(x, y, params)
    m = params.m
    k1 = bessel_k(1, z)
    k2 = bessel_k(2, z)
    alpha = m**4 * k2.value / (_EIGHT_PI_CUBED * z * z)
    beta = m**3 * k1.value / (_EIGHT_PI_CUBED * z)
    return KernelValue(
        xi=complex_xi(x, y, params.eps),
        z=z,
        alpha=alpha,
        beta=beta,
        underflow=k1.underflow or k2.underflow,
    )


def beta_over_alpha(z: complex, m: float) -> complex:
    """beta / alpha = z K_1(z) / (m K_2(z)), from scaled Bessel values so it survives underflow."""
    return z * bessel_k_scaled(1, z) / (m * bessel_k_scaled(2, z))


def kernel_matrix(
    x: FourVector, y: FourVector, params: KernelParams, gamma: Optional[GammaBasis] = None
) -> np.ndarray:
    gamma = gamma or dirac_basis()
    value = alpha_beta(x, y, params)
    return 1j * value.alpha * gamma.slash(value.xi) + value.beta * gamma.identity


def continuum_sea_kernel(
    x: FourVector, y: FourVector, params: KernelParams, gamma: Optional[GammaBasis] = None
) -> np.ndarray:
    """Infinite-box limit of the box-normalized sea kernel -sum psi(x) psi(y)^dagger gamma^0.

    With the damping exp(-omega eps) this is 2 pi (beta - i alpha xi-slash).
    """
    gamma = gamma or dirac_basis()
    value = alpha_beta(x, y, params)
    return 2.0 * math.pi * (value.beta * gamma.identity - 1j * value.alpha * gamma.slash(value.xi))


# --- closed chain ---------------------------------------------------------------------


def chain_coeffs(x: FourVector, y: FourVector, params: KernelParams) -> ChainCoeffs:
    t, dx = separation(x, y)
    r = float(np.linalg.norm(dx))
    eps = params.eps
    value = alpha_beta(x, y, params)
    alpha_sq = abs(value.alpha) ** 2
    if alpha_sq == 0.0:
        logger.debug("alpha underflows at t={}, r={}; returning degenerate coefficients", t, r)
        return ChainCoeffs(
            b=0.0,
            a_mu=np.zeros(4),
            c_0i=np.zeros(3),
            X_mu=np.zeros(4),
            r=r,
            eps=eps,
            alpha_sq=0.0,
            degenerate=True,
        )
    ratio = beta_over_alpha(value.z, params.m)
    X_mu = np.imag(ratio * np.conj(value.xi))
    return ChainCoeffs(
        b=alpha_sq * (t * t - r * r + eps * eps + abs(ratio) ** 2),
        a_mu=2.0 * alpha_sq * X_mu,
        c_0i=-2.0 * alpha_sq * eps * dx,
        X_mu=X_mu,
        r=r,
        eps=eps,
        alpha_sq=alpha_sq,
    )


def chain_matrix(
    x: FourVector, y: FourVector, params: KernelParams, gamma: Optional[GammaBasis] = None
) -> np.ndarray:
    gamma = gamma or dirac_basis()
    return kernel_matrix(x, y, params, gamma) @ kernel_matrix(y, x, params, gamma)


def chain_eigenvalues(c: ChainCoeffs, rel_tol: float = 1e-12) -> ChainEigenvalues:
    disc = c.discriminant
    if disc >= 0.0 or abs(disc) <= rel_tol * c.b * c.b:
        root = math.sqrt(max(disc, 0.0))
        return ChainEigenvalues(complex(c.b + root), complex(c.b - root), False)
    root = math.sqrt(-disc)
    return ChainEigenvalues(complex(c.b, root), complex(c.b, -root), True)


def classify_continuum(
    c: ChainCoeffs, params: Optional[KernelParams] = None, tol: Optional[Tolerances] = None
) -> CausalClass:
    """Sign of X.X - eps^2 r^2, with a relative band of width ``rel_eq`` read as lightlike."""
    tol = tol or Tolerances()
    if c.degenerate:
        return CausalClass.SPACELIKE
    lhs, rhs = c.X_dot_X, c.boundary
    scale = max(abs(lhs), rhs)
    if scale == 0.0 or abs(lhs - rhs) <= tol.rel_eq * scale:
        return CausalClass.LIGHTLIKE
    return CausalClass.TIMELIKE if lhs > rhs else CausalClass.SPACELIKE


def lagrangian_continuum(
    c: ChainCoeffs, params: Optional[KernelParams] = None, tol: Optional[Tolerances] = None
) -> float:
    """16 |alpha|^4 (X.X - eps^2 r^2) on timelike pairs, 0 otherwise."""
    if classify_continuum(c, params, tol) is not CausalClass.TIMELIKE:
        return 0.0
    return 16.0 * c.alpha_sq**2 * (c.X_dot_X - c.boundary)


def variance_identity_check(
    x: FourVector, y: FourVector, params: KernelParams, gamma: Optional[GammaBasis] = None
) -> Dict[str, float]:
    """Compare the closed-form Lagrangian with 4 Var computed from the explicit 4x4 chain."""
    coeffs = chain_coeffs(x, y, params)
    lagr = lagrangian_continuum(coeffs, params)
    four_var = 0.0
    if classify_continuum(coeffs, params) is CausalClass.TIMELIKE:
        chain = chain_matrix(x, y, params, gamma)
        b = np.trace(chain) / 4.0
        centered = chain - b * np.eye(4)
        four_var = float(np.trace(centered @ centered).real)
    scale = max(abs(lagr), abs(four_var))
    residual = abs(lagr - four_var) / scale if scale > 0 else 0.0
    return {"lagrangian": lagr, "four_var": four_var, "residual": residual}


def spectral_lagrangian(c: ChainCoeffs, tol: Optional[Tolerances] = None) -> float:
    """The discrete Lagrangian applied to {lambda_+, lambda_+, lambda_-, lambda_-}."""
    return lagrangian(chain_eigenvalues(c).spectrum(), 2, tol)


def spectral_class(c: ChainCoeffs, tol: Optional[Tolerances] = None) -> CausalClass:
    return classify(chain_eigenvalues(c).spectrum(), tol)


def trace_normalization(params: KernelParams) -> float:
    """lambda = (2 pi)^3 eps^2 / m, fixing the local trace to one."""
    if params.eps <= 0.0:
        raise StructuralError("trace normalization needs eps > 0")
    return (2.0 * math.pi) ** 3 * params.eps**2 / params.m


# --- tables ---------------------------------------------------------------------------

KERNEL_TABLE_COLUMNS = (
    "t",
    "r",
    "eps",
    "re_alpha",
    "im_alpha",
    "re_beta",
    "im_beta",
    "b",
    "X_dot_X",
    "class",
    "lagrangian",
)


def kernel_table(
    pairs: Iterable[Tuple[float, float]], params: KernelParams
) -> List[Dict[str, object]]:
    """One row per (t, r); y sits at (t, r, 0, 0) relative to the origin."""
    origin = FourVector()
    rows: List[Dict[str, object]] = []
    for t, r in pairs:
        y = FourVector.of(t, r)
        value = alpha_beta(origin, y, params)
        coeffs = chain_coeffs(origin, y, params)
        rows.append(
            {
                "t": float(t),
                "r": float(r),
                "eps": params.eps,
                "re_alpha": value.alpha.real,
                "im_alpha": value.alpha.imag,
                "re_beta": value.beta.real,
                "im_beta": value.beta.imag,
                "b": coeffs.b,
                "X_dot_X": coeffs.X_dot_X,
                "class": classify_continuum(coeffs, params).value,
                "lagrangian": lagrangian_continuum(coeffs, params),
            }
        )
    return rows



# --- vectorized integrand ---------------------------------------------------------------


def timelike_excess(
    t: np.ndarray, r: np.ndarray, m: float, eps: float, alpha_power: int = 2
) -> np.ndarray:
    """|alpha|^p (X.X - eps^2 r^2) where positive, 0 elsewhere, on arrays of (t, r).

    ``alpha_power = 2`` gives the variance-density integrand, ``4`` the spectral Lagrangian
    divided by 16.
    """
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    z = m * np.sqrt((r * r - t * t + eps * eps) + 2j * t * eps)
    k1e = special.kve(1, z)
    k2e = special.kve(0, z) + 2.0 * k1e / z
    ratio = z * k1e / (m * k2e)
    abs_alpha = m**4 * np.abs(k2e) * np.exp(-z.real) / (_EIGHT_PI_CUBED * np.abs(z) ** 2)
    X0 = t * ratio.imag + eps * ratio.real
    Xr = ratio.imag * r
    excess = X0 * X0 - Xr * Xr - eps * eps * r * r
    return np.where(excess > 0.0, abs_alpha**alpha_power * excess, 0.0)


__all__ = [
    "BesselValue",
    "ChainCoeffs",
    "ChainEigenvalues",
    "KERNEL_TABLE_COLUMNS",
    "KernelValue",
    "alpha_beta",
    "bessel_k",
    "bessel_k_scaled",
    "beta_over_alpha",
    "chain_coeffs",
    "chain_eigenvalues",
    "chain_matrix",
    "classify_continuum",
    "complex_xi",
    "continuum_sea_kernel",
    "kernel_matrix",
    "kernel_table",
    "lagrangian_continuum",
    "spectral_class",
    "spectral_lagrangian",
    "timelike_excess",
    "trace_normalization",
    "variance_identity_check",
    "z_arg",
]
