import pytest
from pydantic import ValidationError

from src.models.models import (
    DiscreteCFSDocument,
    FourVector,
    KernelGridConfig,
    KernelParams,
    RunConfig,
    SeaSampleConfig,
    SweepConfig,
    Tolerances,
)


def test_tolerances_defaults_and_bounds():
    tol = Tolerances()
    assert tol.rel_eq == tol.rel_real == 1e-9

    with pytest.raises(ValidationError):
        Tolerances(rel_eq=0.0)
    with pytest.raises(ValidationError):
        Tolerances(rel_real=1e-2)


def test_kernel_params_validation():
    assert KernelParams(m=2.0, eps=0.0).eps == 0.0
    with pytest.raises(ValidationError):
        KernelParams(m=0.0)
    with pytest.raises(ValidationError):
        KernelParams(eps=-1e-3)


def test_four_vector_helpers():
    x = FourVector.of(2.0, 1.0, 0.0, 0.0)
    y = FourVector.of(1.0, 0.0, 1.0, 0.0)
    assert x.minkowski_dot(y) == 2.0
    assert list(x.spatial()) == [1.0, 0.0, 0.0]
    with pytest.raises(ValidationError):
        FourVector.of(float("nan"))


@pytest.mark.parametrize(
    "eps_list",
    [[1e-2, 5e-3, 1e-3], [1e-3, 5e-3, 1e-2], [], [1e-3]],
)
def test_sweep_config_accepts_sorted_lists(eps_list):
    assert SweepConfig(eps_list=eps_list).eps_list == eps_list


@pytest.mark.parametrize("eps_list", [[1e-2, 1e-3, 5e-3], [1e-3, 1e-3], [1e-3, -1e-3]])
def test_sweep_config_rejects_unsorted_or_non_positive(eps_list):
    with pytest.raises(ValidationError):
        SweepConfig(eps_list=eps_list)


def test_sea_config_requires_lattice_points():
    with pytest.raises(ValidationError):
        SeaSampleConfig(box_len=1.0, k_cut=1.0, lattice=[])
    with pytest.raises(ValidationError):
        SeaSampleConfig(box_len=1.0, k_cut=1.0, lattice=[FourVector()], eps_soft=0.0)


def test_kernel_grid_pairs_are_row_major():
    grid = KernelGridConfig(t_values=[0.0, 1.0], r_values=[0.5, 2.0])
    assert grid.pairs() == [(0.0, 0.5), (0.0, 2.0), (1.0, 0.5), (1.0, 2.0)]
    with pytest.raises(ValidationError):
        KernelGridConfig(t_values=[0.0], r_values=[-1.0])


def test_run_config_rejects_unknown_command():
    with pytest.raises(ValidationError):
        RunConfig(command="minimize")


def test_discrete_cfs_document_checks_shapes():
    point = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
    doc = DiscreteCFSDocument(n=1, N=2, weights=[1.0], points=[point])
    assert doc.format == "cfs-lab/discrete-cfs"
    assert doc.version == 1

    with pytest.raises(ValidationError):
        DiscreteCFSDocument(n=1, N=3, weights=[1.0], points=[point])
    with pytest.raises(ValidationError):
        DiscreteCFSDocument(n=1, N=2, weights=[1.0, 2.0], points=[point])
