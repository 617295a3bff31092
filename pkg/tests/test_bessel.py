import math

import numpy as np
import pytest
from scipy import special

from src.services.minkowski import bessel_k, bessel_k_scaled
from src.utils.errors import BesselDomainError, StructuralError

mpmath = pytest.importorskip("mpmath")


def _grid():
    moduli = np.logspace(-3, math.log10(50.0), 25)
    angles = np.linspace(-math.pi / 2, math.pi / 2, 20)
    return [complex(rho * math.cos(phi), rho * math.sin(phi)) for rho in moduli for phi in angles]


@pytest.mark.parametrize("nu", [0, 1, 2])
def test_matches_high_precision_reference(nu):
    grid = _grid()
    assert len(grid) == 500
    with mpmath.workdps(30):
        for z in grid:
            expected = complex(mpmath.besselk(nu, mpmath.mpc(z.real, z.imag)))
            value = bessel_k(nu, z)
            assert not value.underflow
            assert abs(value.value - expected) <= 1e-12 * abs(expected), (nu, z)


def test_known_value():
    assert bessel_k(1, 1.0).value == pytest.approx(0.6019072301972346, rel=1e-14)


@pytest.mark.parametrize("z", [0.3, 2.0, 1.5 + 4.0j, 0.01 - 7.0j, 20.0 + 1.0j])
def test_second_order_agrees_with_direct_evaluation(z):
    direct = special.kv(2, z)
    assert bessel_k(2, z).value == pytest.approx(direct, rel=1e-12)
    # K_{nu+1} = K_{nu-1} + (2 nu / z) K_nu at nu = 1
    k0, k1, k2 = (bessel_k(nu, z).value for nu in (0, 1, 2))
    assert k2 == pytest.approx(k0 + 2.0 * k1 / z, rel=1e-14)


def test_large_argument_asymptotics():
    previous = math.inf
    for z in (10.0, 100.0, 1000.0):
        ratio = bessel_k_scaled(1, z) * math.sqrt(2.0 * z / math.pi)
        deviation = abs(ratio - 1.0)
        assert deviation < previous
        previous = deviation
    assert previous < 1e-3


def test_underflow_is_flagged():
    value = bessel_k(1, 800.0)
    assert value.underflow
    assert value.value == 0
    assert bessel_k_scaled(1, 800.0) != 0


@pytest.mark.parametrize("z", [0.0, -1.0, -0.5 + 2.0j, complex(math.nan, 0.0), math.inf])
def test_domain_errors(z):
    with pytest.raises(BesselDomainError):
        bessel_k(1, z)


def test_unsupported_order():
    with pytest.raises(StructuralError):
        bessel_k_scaled(3, 1.0)
