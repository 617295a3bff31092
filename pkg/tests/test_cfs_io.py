import json

import numpy as np
import pytest

from src.models.models import FitResult, SweepResult, SweepRow
from src.services.observables import Region, subsystem_from_vectors
from src.utils.cfs_io import (
    read_cfs,
    read_region,
    read_sea_config,
    read_states,
    read_subsystem,
    read_sweep_config,
    write_cfs,
    write_fit_summary,
    write_region,
    write_subsystem,
)
from src.utils.errors import ParseError, StructuralError


def test_cfs_round_trip_is_exact(make_cfs, tmp_path):
    cfs = make_cfs(n=2, N=5, n_points=3)
    path = write_cfs(tmp_path / "cfs.json", cfs)
    loaded = read_cfs(path)
    assert np.array_equal(loaded.weights, cfs.weights)
    for a, b in zip(loaded.points, cfs.points):
        assert np.array_equal(a.psi, b.psi)
        assert a.n == b.n

    header = json.loads(path.read_text())
    assert header["format"] == "cfs-lab/discrete-cfs"
    assert header["version"] == 1


def test_cfs_syntax_error_reports_line_and_column(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "n": 1,\n  "N": 2,\n  "weights": [1.0,,]\n}\n')
    with pytest.raises(ParseError) as excinfo:
        read_cfs(path)
    assert excinfo.value.line == 4
    assert excinfo.value.column is not None
    assert str(path) in str(excinfo.value)


def test_cfs_shape_errors_are_parse_errors(tmp_path):
    path = tmp_path / "shape.json"
    point = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
    path.write_text(json.dumps({"n": 1, "N": 3, "weights": [1.0], "points": [point]}))
    with pytest.raises(ParseError, match="not a 2x3 matrix"):
        read_cfs(path)

    path.write_text(json.dumps({"n": 1, "N": 2, "weights": [1.0], "points": [point], "version": 7}))
    with pytest.raises(ParseError, match="version"):
        read_cfs(path)


def test_non_positive_weight_is_structural(tmp_path):
    path = tmp_path / "weights.json"
    point = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
    path.write_text(json.dumps({"n": 1, "N": 2, "weights": [0.0], "points": [point]}))
    with pytest.raises(StructuralError):
        read_cfs(path)


def test_missing_input_is_structural(tmp_path):
    with pytest.raises(StructuralError, match="not found"):
        read_cfs(tmp_path / "absent.json")


def test_region_round_trip(tmp_path):
    region = Region.of([3, 0, 2])
    path = write_region(tmp_path / "region.json", region)
    assert json.loads(path.read_text())["indices"] == [0, 2, 3]
    assert read_region(path) == region


def test_subsystem_round_trip(tmp_path):
    sub = subsystem_from_vectors([[1.0, 1j, 0.0], [0.0, 0.5, 2.0]])
    path = write_subsystem(tmp_path / "sub.json", sub)
    loaded = read_subsystem(path)
    assert np.array_equal(loaded.basis, sub.basis)


def test_states_keep_non_orthogonal_vectors(tmp_path):
    path = tmp_path / "states.json"
    path.write_text(
        json.dumps({"N": 2, "basis": [[[1.0, 0.0], [0.0, 0.0]], [[0.6, 0.0], [0.0, 0.8]]]})
    )
    states = read_states(path)
    assert np.array_equal(states, np.array([[1.0, 0.0], [0.6, 0.8j]]))
    with pytest.raises(StructuralError):
        read_subsystem(path)

    path.write_text(json.dumps({"N": 3, "basis": [[[1.0, 0.0], [0.0, 0.0]]]}))
    with pytest.raises(ParseError, match="3 entries"):
        read_states(path)


def test_run_configs_are_validated(tmp_path):
    sweep_path = tmp_path / "sweep.json"
    sweep_path.write_text(json.dumps({"eps_list": [1e-2, 1e-3], "box_len": 2.0}))
    assert read_sweep_config(sweep_path).box_len == 2.0

    sweep_path.write_text(json.dumps({"eps_list": [1e-3, 1e-2, 5e-3]}))
    with pytest.raises(ParseError, match="eps_list"):
        read_sweep_config(sweep_path)

    sea_path = tmp_path / "sea.json"
    sea_path.write_text(json.dumps({"box_len": 4.0, "k_cut": 1.0, "lattice": [{"t": 0.0}]}))
    assert read_sea_config(sea_path).lattice[0].t == 0.0


def test_fit_summary_lists_row_status(tmp_path):
    result = SweepResult(
        rows=[
            SweepRow(m_eps=1e-2, l_eps=1.0, est_rel_err=0.0, n_evals=1, seconds=0.0),
            SweepRow(
                m_eps=1e-3,
                l_eps=float("nan"),
                est_rel_err=float("nan"),
                n_evals=0,
                seconds=0.0,
                converged=False,
                error="boom",
            ),
        ]
    )
    fit = FitResult(a=1.0, b=8.0, stderr_b=0.1, stderr_log_a=0.2, r2=0.99, n_rows=1)
    summary = json.loads(write_fit_summary(tmp_path / "fit.json", fit, result).read_text())
    assert summary["fit"]["b"] == 8.0
    assert summary["rows"][1] == {"m_eps": 1e-3, "converged": False, "error": "boom"}
    assert summary["rows"][0]["error"] is None

    empty = json.loads(write_fit_summary(tmp_path / "none.json", None, result).read_text())
    assert empty["fit"] is None
