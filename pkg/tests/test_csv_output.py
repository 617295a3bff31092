import math

import pytest

from src.models.models import SweepResult, SweepRow
from src.utils.csv_output import (
    SWEEP_COLUMNS,
    format_cell,
    read_sweep_csv,
    write_rows,
    write_sweep_csv,
)
from src.utils.errors import ParseError, StructuralError


@pytest.mark.parametrize(
    ("value", "expected"),
    [
        (0.1, "0.1"),
        (2.7e-8, "2.7e-08"),
        (math.nan, "nan"),
        (3, "3"),
        (True, "true"),
        ("timelike", "timelike"),
    ],
)
def test_format_cell(value, expected):
    assert format_cell(value) == expected


def test_sweep_csv_round_trip(tmp_path):
    result = SweepResult(
        rows=[
            SweepRow(
                m_eps=1e-2,
                l_eps=1.2345678901234567e-9,
                est_rel_err=3e-6,
                n_evals=96,
                seconds=0.0,
            ),
            SweepRow(m_eps=5e-3, l_eps=math.nan, est_rel_err=math.nan, n_evals=0, seconds=0.0),
        ]
    )
    path = write_sweep_csv(result, tmp_path / "sweep.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(SWEEP_COLUMNS)
    assert lines[1] == "0.01,1.2345678901234567e-09,3e-06,96,0.0"

    loaded = read_sweep_csv(path)
    assert loaded.rows[0].l_eps == result.rows[0].l_eps
    assert loaded.rows[0].n_evals == 96
    assert math.isnan(loaded.rows[1].l_eps)


def test_bad_row_reports_its_line(tmp_path):
    path = write_rows(
        tmp_path / "bad.csv",
        ("m_eps", "l_eps"),
        [{"m_eps": 0.01, "l_eps": 1.0}, {"m_eps": "oops", "l_eps": 2.0}],
    )
    with pytest.raises(ParseError) as excinfo:
        read_sweep_csv(path)
    assert excinfo.value.line == 3


def test_missing_columns_and_files(tmp_path):
    path = write_rows(tmp_path / "cols.csv", ("m_eps",), [{"m_eps": 0.01}])
    with pytest.raises(ParseError, match="l_eps"):
        read_sweep_csv(path)
    with pytest.raises(StructuralError):
        read_sweep_csv(tmp_path / "absent.csv")
