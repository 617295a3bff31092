import numpy as np
import pytest

from src.models.models import Tolerances
from src.services.cfs_core import DiscreteCFS, point_from_psi, random_cfs


@pytest.fixture
def rng():
    """Seeded generator so random instances are reproducible across runs."""

    return np.random.default_rng(20240917)


@pytest.fixture
def make_cfs(rng):
    """Factory for random discrete CFS instances drawn from the seeded generator."""

    def _make(n=2, N=6, n_points=4, rank=None, tol=None):
        return random_cfs(rng, n, N, n_points, rank=rank, tol=tol or Tolerances())

    return _make


@pytest.fixture
def identity_cfs():
    """Single point with psi = identity (N = 2n = 2), weight 1."""

    point = point_from_psi(np.eye(2, dtype=complex), 1)
    return DiscreteCFS(points=(point,), weights=np.array([1.0]))
