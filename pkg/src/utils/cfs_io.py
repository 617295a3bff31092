"""Structured-text documents for CFS instances, regions, subsystems and run configs.

Complex matrices are written row-major with every entry as ``[re, im]``; floats use the
shortest round-trip representation.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Type, TypeVar

import numpy as np
from pydantic import BaseModel, ValidationError

from src.models.models import (
    DiscreteCFSDocument,
    FitResult,
    RegionDocument,
    SeaSampleConfig,
    SubsystemDocument,
    SweepConfig,
    SweepResult,
    Tolerances,
)
from src.services.cfs_core import DiscreteCFS, point_from_psi
from src.services.observables import Region, Subsystem
from src.utils.errors import ParseError
from src.utils.json_output import PathLike, load_json, write_json

M = TypeVar("M", bound=BaseModel)


def _complex_to_pairs(matrix: np.ndarray) -> list:
    matrix = np.asarray(matrix, dtype=complex)
    return np.stack([matrix.real, matrix.imag], axis=-1).tolist()


def _pairs_to_complex(pairs: list) -> np.ndarray:
    array = np.asarray(pairs, dtype=float)
    return array[..., 0] + 1j * array[..., 1]


def validate_document(model: Type[M], payload: object, source: str) -> M:
    try:
        return model.model_validate(payload)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first.get("loc", ())) or "document"
        raise ParseError(
            f"{where}: {first.get('msg', 'invalid value')} ({exc.error_count()} error(s))",
            source=source,
        ) from exc


def read_model(path: PathLike, model: Type[M]) -> M:
    return validate_document(model, load_json(path), str(path))


# --- discrete CFS ----------------------------------------------------------------------


def cfs_to_document(cfs: DiscreteCFS) -> DiscreteCFSDocument:
    return DiscreteCFSDocument(
        n=cfs.n,
        N=cfs.N,
        weights=cfs.weights.tolist(),
        points=[_complex_to_pairs(p.psi) for p in cfs.points],
    )


def cfs_from_document(doc: DiscreteCFSDocument, tol: Optional[Tolerances] = None) -> DiscreteCFS:
    points = tuple(point_from_psi(_pairs_to_complex(matrix), doc.n) for matrix in doc.points)
    return DiscreteCFS(points=points, weights=np.asarray(doc.weights), tol=tol or Tolerances())


def write_cfs(path: PathLike, cfs: DiscreteCFS, pretty: bool = False) -> Path:
    return write_json(path, cfs_to_document(cfs), pretty=pretty)


def read_cfs(path: PathLike, tol: Optional[Tolerances] = None) -> DiscreteCFS:
    return cfs_from_document(read_model(path, DiscreteCFSDocument), tol)


# --- regions and subsystems ------------------------------------------------------------


def region_to_document(region: Region) -> RegionDocument:
    return RegionDocument(indices=region.sorted())


def write_region(path: PathLike, region: Region) -> Path:
    return write_json(path, region_to_document(region))


def read_region(path: PathLike) -> Region:
    return Region.of(read_model(path, RegionDocument).indices)


def subsystem_to_document(subsystem: Subsystem) -> SubsystemDocument:
    return SubsystemDocument(N=subsystem.N, basis=_complex_to_pairs(subsystem.basis))


def write_subsystem(path: PathLike, subsystem: Subsystem) -> Path:
    return write_json(path, subsystem_to_document(subsystem))


def read_states(path: PathLike) -> np.ndarray:
    """State vectors stored in the subsystem layout, without the orthonormality requirement."""
    doc = read_model(path, SubsystemDocument)
    if any(len(row) != doc.N for row in doc.basis):
        raise ParseError(f"basis vectors must have {doc.N} entries", source=str(path))
    return _pairs_to_complex(doc.basis) if doc.basis else np.zeros((0, doc.N), dtype=complex)


def read_subsystem(path: PathLike) -> Subsystem:
    return Subsystem(basis=read_states(path))


# --- sweep reports ----------------------------------------------------------------------


def write_fit_summary(path: PathLike, fit: Optional[FitResult], result: SweepResult) -> Path:
    """Fit parameters plus the per-row convergence status of the sweep they came from."""
    rows = [
        {"m_eps": row.m_eps, "converged": row.converged, "error": row.error}
        for row in result.rows
    ]
    return write_json(path, {"fit": fit.model_dump() if fit else None, "rows": rows})


# --- run configs -----------------------------------------------------------------------


def read_sweep_config(path: PathLike) -> SweepConfig:
    return read_model(path, SweepConfig)


def read_sea_config(path: PathLike) -> SeaSampleConfig:
    return read_model(path, SeaSampleConfig)


__all__ = [
    "cfs_from_document",
    "cfs_to_document",
    "read_cfs",
    "read_model",
    "read_region",
    "read_sea_config",
    "read_states",
    "read_subsystem",
    "read_sweep_config",
    "region_to_document",
    "subsystem_to_document",
    "validate_document",
    "write_fit_summary",
    "write_cfs",
    "write_region",
    "write_subsystem",
]
