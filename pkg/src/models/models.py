from enum import Enum
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

DISCRETE_CFS_FORMAT = "cfs-lab/discrete-cfs"
REGION_FORMAT = "cfs-lab/region"
SUBSYSTEM_FORMAT = "cfs-lab/subsystem"
FORMAT_VERSION = 1


class CausalClass(str, Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"


class Tolerances(BaseModel):
    """Relative tolerances used by classification, rank cutoffs and Hermiticity checks."""

    model_config = ConfigDict(frozen=True)

    rel_eq: float = 1e-9
    rel_real: float = 1e-9
    tol_rank: float = 1e-10
    tol_herm: float = 1e-10

    @field_validator("rel_eq", "rel_real", "tol_rank", "tol_herm")
    @classmethod
    def _bounded(cls, value: float) -> float:
        if not (0.0 < value <= 1e-3):
            raise ValueError(f"tolerances must lie in (0, 1e-3], got {value}")
        return value


class ELParams(BaseModel):
    """Lagrange multipliers of the boundedness, trace and volume constraints."""

    model_config = ConfigDict(frozen=True)

    kappa: float = 0.0
    r_tr: float = 0.0
    s_vol: float = 0.0

    @field_validator("kappa")
    @classmethod
    def _non_negative(cls, value: float) -> float:
        if value < 0:
            raise ValueError(f"kappa must be non-negative, got {value}")
        return value


class ActionReport(BaseModel):
    action: float
    volume: float
    trace: float
    boundedness: float


class FourVector(BaseModel):
    """Minkowski four-vector with signature (+, -, -, -)."""

    model_config = ConfigDict(frozen=True)

    t: float = 0.0
    x3: Tuple[float, float, float] = (0.0, 0.0, 0.0)

    @model_validator(mode="after")
    def _finite(self) -> "FourVector":
        if not np.all(np.isfinite([self.t, *self.x3])):
            raise ValueError("four-vector components must be finite")
        return self

    @classmethod
    def of(cls, t: float, x: float = 0.0, y: float = 0.0, z: float = 0.0) -> "FourVector":
        return cls(t=t, x3=(x, y, z))

    def spatial(self) -> np.ndarray:
        return np.asarray(self.x3, dtype=float)

    def minkowski_dot(self, other: "FourVector") -> float:
        return self.t * other.t - float(np.dot(self.spatial(), other.spatial()))


class KernelParams(BaseModel):
    """Mass m (inverse length, c = hbar = 1) and regularization length eps."""

    model_config = ConfigDict(frozen=True)

    m: float = 1.0
    eps: float = 1e-3

    @field_validator("m")
    @classmethod
    def _positive_mass(cls, value: float) -> float:
        if value <= 0:
            raise ValueError(f"mass must be positive, got {value}")
        return value

    @field_validator("eps")
    @classmethod
    def _non_negative_eps(cls, value: float) -> float:
        if value < 0:
            raise ValueError(f"eps must be non-negative, got {value}")
        return value


class QuadSettings(BaseModel):
    """Composite Gauss-Legendre settings for the light-cone adapted quadrature.

    Level k uses ``base_panels * 2**k`` panels per direction; refinement stops once two
    successive levels agree to ``target_rel_err`` or ``max_depth`` is reached.
    """

    model_config = ConfigDict(frozen=True)

    order: int = Field(default=8, ge=2, le=64)
    base_panels: int = Field(default=12, ge=1)
    max_depth: int = Field(default=3, ge=1, le=8)
    target_rel_err: float = Field(default=1e-5, gt=0)
    band: float = Field(default=8.0, gt=0, description="light-cone band half-width in units of eps")
    chunk_panels: int = Field(default=4, ge=1, description="u-panels per scheduled work chunk")


class SweepConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    m: float = 1.0
    eps_list: List[float] = Field(default_factory=lambda: [1e-2, 5e-3, 2e-3, 1e-3])
    box_len: float = 5.0
    quad: QuadSettings = Field(default_factory=QuadSettings)
    sigma_mode: bool = False
    integrand: Literal["variance_density", "lagrangian"] = "variance_density"
    threads: int = Field(default=1, ge=1)

    @field_validator("m", "box_len")
    @classmethod
    def _positive(cls, value: float) -> float:
        if value <= 0:
            raise ValueError(f"must be positive, got {value}")
        return value

    @field_validator("eps_list")
    @classmethod
    def _sorted_positive(cls, values: List[float]) -> List[float]:
        if any(value <= 0 for value in values):
            raise ValueError("eps_list entries must be strictly positive")
        pairs = list(zip(values, values[1:]))
        ascending = all(a < b for a, b in pairs)
        descending = all(a > b for a, b in pairs)
        if not (ascending or descending):
            raise ValueError("eps_list must be strictly sorted (ascending or descending)")
        return values


class SweepRow(BaseModel):
    m_eps: float
    l_eps: float
    est_rel_err: float
    n_evals: int
    seconds: float
    converged: bool = True
    error: Optional[str] = None


class SweepResult(BaseModel):
    rows: List[SweepRow] = Field(default_factory=list)


class FitResult(BaseModel):
    a: float
    b: float
    stderr_b: float
    stderr_log_a: float
    r2: float
    n_rows: int
    excluded: int = 0


class KernelGridConfig(BaseModel):
    """(t, r) grid for kernel tables; every t is paired with every r."""

    model_config = ConfigDict(frozen=True)

    kernel: KernelParams = Field(default_factory=KernelParams)
    t_values: List[float]
    r_values: List[float]

    @field_validator("t_values", "r_values")
    @classmethod
    def _finite_non_empty(cls, values: List[float]) -> List[float]:
        if not values:
            raise ValueError("grid axes must not be empty")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid values must be finite")
        return values

    @field_validator("r_values")
    @classmethod
    def _non_negative_radius(cls, values: List[float]) -> List[float]:
        if any(value < 0 for value in values):
            raise ValueError("spatial distances must be non-negative")
        return values

    def pairs(self) -> List[Tuple[float, float]]:
        return [(t, r) for t in self.t_values for r in self.r_values]


class SeaSampleConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    box_len: float
    k_cut: float
    m: float = 1.0
    lattice: List[FourVector]
    eps_soft: Optional[float] = None
    budget: int = Field(default=20_000_000, ge=1)

    @field_validator("box_len", "k_cut", "m")
    @classmethod
    def _positive(cls, value: float) -> float:
        if value <= 0:
            raise ValueError(f"must be positive, got {value}")
        return value

    @field_validator("eps_soft")
    @classmethod
    def _positive_soft(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and value <= 0:
            raise ValueError(f"eps_soft must be positive when given, got {value}")
        return value

    @field_validator("lattice")
    @classmethod
    def _non_empty(cls, value: List[FourVector]) -> List[FourVector]:
        if not value:
            raise ValueError("lattice must contain at least one point")
        return value


class RunConfig(BaseModel):
    """Resolved settings of one CLI invocation."""

    command: Literal[
        "classify", "action", "el", "observables", "kernel", "sea-sample", "sweep", "fit"
    ]
    inputs: List[str] = Field(default_factory=list)
    states: Optional[str] = None
    region: Optional[str] = None
    subsystem: Optional[str] = None
    out_dir: str = "out"
    tolerances: Tolerances = Field(default_factory=Tolerances)
    threads: int = Field(default=1, ge=1)
    dry_run: bool = False
    sweep: Optional[SweepConfig] = None
    sea: Optional[SeaSampleConfig] = None
    kernel: Optional[KernelGridConfig] = None
    el: Optional[ELParams] = None


# --- structured-text documents -------------------------------------------------------

ComplexPair = Tuple[float, float]


class DiscreteCFSDocument(BaseModel):
    format: Literal["cfs-lab/discrete-cfs"] = DISCRETE_CFS_FORMAT
    version: int = FORMAT_VERSION
    n: int = Field(ge=1)
    N: int = Field(ge=1)
    weights: List[float]
    points: List[List[List[ComplexPair]]]

    @model_validator(mode="after")
    def _consistent(self) -> "DiscreteCFSDocument":
        if self.version != FORMAT_VERSION:
            raise ValueError(f"unsupported format version {self.version}")
        if len(self.weights) != len(self.points):
            raise ValueError(
                f"{len(self.weights)} weights given for {len(self.points)} points"
            )
        for index, matrix in enumerate(self.points):
            if len(matrix) != 2 * self.n or any(len(row) != self.N for row in matrix):
                raise ValueError(f"point {index} is not a {2 * self.n}x{self.N} matrix")
        return self


class RegionDocument(BaseModel):
    format: Literal["cfs-lab/region"] = REGION_FORMAT
    version: int = FORMAT_VERSION
    indices: List[int]


class SubsystemDocument(BaseModel):
    format: Literal["cfs-lab/subsystem"] = SUBSYSTEM_FORMAT
    version: int = FORMAT_VERSION
    N: int = Field(ge=1)
    basis: List[List[ComplexPair]]
