from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Iterable, List, Mapping, Sequence

from src.models.models import SweepResult, SweepRow
from src.utils.errors import ParseError, StructuralError
from src.utils.json_output import PathLike

SWEEP_COLUMNS = ("m_eps", "l_eps", "est_rel_err", "n_evals", "seconds")


def format_cell(value: object) -> str:
    """Shortest round-trip text for floats ('.' decimal separator), str() otherwise."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return repr(value)
    return str(value)


def write_rows(
    path: PathLike, columns: Sequence[str], rows: Iterable[Mapping[str, object]]
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(row[column]) for column in columns])
    return path


def write_sweep_csv(result: SweepResult, path: PathLike) -> Path:
    return write_rows(path, SWEEP_COLUMNS, (row.model_dump() for row in result.rows))


def read_sweep_csv(path: PathLike) -> SweepResult:
    """Read rows written by ``write_sweep_csv`` (extra columns are ignored)."""
    path = Path(path)
    if not path.exists():
        raise StructuralError(f"input file not found: {path}")
    rows: List[SweepRow] = []
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        present = reader.fieldnames or []
        missing = [column for column in ("m_eps", "l_eps") if column not in present]
        if missing:
            raise ParseError(f"missing columns {missing}", source=str(path), line=1)
        for record in reader:
            try:
                rows.append(
                    SweepRow(
                        m_eps=float(record["m_eps"]),
                        l_eps=float(record["l_eps"]),
                        est_rel_err=float(record.get("est_rel_err") or 0.0),
                        n_evals=int(float(record.get("n_evals") or 0)),
                        seconds=float(record.get("seconds") or 0.0),
                    )
                )
            except (TypeError, ValueError) as exc:
                raise ParseError(str(exc), source=str(path), line=reader.line_num) from exc
    return SweepResult(rows=rows)


__all__ = ["SWEEP_COLUMNS", "format_cell", "read_sweep_csv", "write_rows", "write_sweep_csv"]
