"""Exception hierarchy shared by the numerical services and the CLI."""

from __future__ import annotations

from typing import Optional


class CFSError(Exception):
    """Base class for predictable failures surfaced by cfs-lab."""

    exit_code = 1


class StructuralError(CFSError, ValueError):
    """Inputs with inconsistent shapes, invalid parameters or broken invariants."""

    exit_code = 5


class BesselDomainError(StructuralError):
    """Argument outside the principal-branch domain of K_nu."""


class BranchCutError(StructuralError):
    """Unregularized evaluation on (or inside) the light cone."""


class NumericalError(CFSError, ArithmeticError):
    """Eigen-solver failures, non-finite intermediate values, unusable fits."""

    exit_code = 3


class ResourceError(CFSError, RuntimeError):
    """A requested computation exceeds the configured budget."""

    exit_code = 4

    def __init__(self, message: str, estimate: Optional[int] = None, budget: Optional[int] = None):
        super().__init__(message)
        self.estimate = estimate
        self.budget = budget


class ParseError(CFSError, ValueError):
    """Structured-text or CSV input that cannot be decoded."""

    exit_code = 2

    def __init__(
        self,
        message: str,
        *,
        source: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ):
        location = ""
        if source:
            location = source
        if line is not None:
            location = f"{location}:{line}" if location else f"line {line}"
            if column is not None:
                location = f"{location}:{column}"
        super().__init__(f"{location}: {message}" if location else message)
        self.source = source
        self.line = line
        self.column = column


__all__ = [
    "BesselDomainError",
    "BranchCutError",
    "CFSError",
    "NumericalError",
    "ParseError",
    "ResourceError",
    "StructuralError",
]
