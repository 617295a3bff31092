import os
from typing import Optional

import toml
from dotenv import load_dotenv

# Load .env early so environment overrides are visible before config values are read.
load_dotenv()

CONFIG_PATH = os.getenv("CFS_LAB_CONFIG", "cfs_lab.toml")


def _load_config(path: str) -> dict:
    if not os.path.exists(path):
        return {}
    return toml.load(path)


config = _load_config(CONFIG_PATH)
_TOLERANCE_CONFIG = config.get("TOLERANCES", {})
_SWEEP_CONFIG = config.get("SWEEP", {})
_SEA_CONFIG = config.get("SEA", {})
_RUNTIME_CONFIG = config.get("RUNTIME", {})


def _env_override(var_name: str, fallback: Optional[str]) -> Optional[str]:
    """Return a stripped environment override when present, else the fallback."""
    raw = os.getenv(var_name)
    if raw is None:
        return fallback
    stripped = raw.strip()
    return stripped or fallback


def _bool_from_env(var_name: str, default: bool) -> bool:
    """Read boolean flags from the environment while keeping TOML defaults."""
    raw_value = os.getenv(var_name)
    if raw_value is None:
        return default

    normalized = raw_value.strip().lower()
    if normalized in {"1", "true", "yes", "on"}:
        return True
    if normalized in {"0", "false", "no", "off"}:
        return False
    return default


def _float_from_env(var_name: str, default: float) -> float:
    raw = _env_override(var_name, None)
    if raw is None:
        return float(default)
    return float(raw)


def _int_from_env(var_name: str, default: int) -> int:
    raw = _env_override(var_name, None)
    if raw is None:
        return int(default)
    return int(raw)


def _float_list_from_env(var_name: str, default: list[float]) -> list[float]:
    """Comma-separated floats, e.g. ``1e-2,5e-3,2e-3``."""
    raw = _env_override(var_name, None)
    if raw is None:
        return [float(value) for value in default]
    return [float(item) for item in raw.split(",") if item.strip()]


# Causal classification and rank cutoffs (relative to the spectral radius of the pair).
TOL_REL_EQ = _float_from_env("CFS_TOL_EQ", _TOLERANCE_CONFIG.get("REL_EQ", 1e-9))
TOL_REL_REAL = _float_from_env("CFS_TOL_REAL", _TOLERANCE_CONFIG.get("REL_REAL", 1e-9))
TOL_RANK = _float_from_env("CFS_TOL_RANK", _TOLERANCE_CONFIG.get("RANK", 1e-10))
TOL_HERM = _float_from_env("CFS_TOL_HERM", _TOLERANCE_CONFIG.get("HERM", 1e-10))

# Total-variance sweep defaults (internal units m = 1).
SWEEP_MASS = _float_from_env("CFS_SWEEP_MASS", _SWEEP_CONFIG.get("MASS", 1.0))
SWEEP_BOX_LEN = _float_from_env("CFS_SWEEP_BOX_LEN", _SWEEP_CONFIG.get("BOX_LEN", 5.0))
SWEEP_EPS_LIST = _float_list_from_env(
    "CFS_SWEEP_EPS_LIST",
    _SWEEP_CONFIG.get("EPS_LIST", [1e-2, 5e-3, 2e-3, 1e-3, 5e-4, 2e-4, 1e-4]),
)
SWEEP_SIGMA_MODE = _bool_from_env("CFS_SWEEP_SIGMA_MODE", _SWEEP_CONFIG.get("SIGMA_MODE", False))
QUAD_ORDER = _int_from_env("CFS_QUAD_ORDER", _SWEEP_CONFIG.get("QUAD_ORDER", 8))
QUAD_BASE_PANELS = _int_from_env("CFS_QUAD_BASE_PANELS", _SWEEP_CONFIG.get("QUAD_BASE_PANELS", 12))
QUAD_MAX_DEPTH = _int_from_env("CFS_QUAD_MAX_DEPTH", _SWEEP_CONFIG.get("QUAD_MAX_DEPTH", 3))
QUAD_TARGET_REL_ERR = _float_from_env(
    "CFS_QUAD_TARGET_REL_ERR", _SWEEP_CONFIG.get("QUAD_TARGET_REL_ERR", 1e-5)
)
FIT_MIN_ROWS = _int_from_env("CFS_FIT_MIN_ROWS", _SWEEP_CONFIG.get("FIT_MIN_ROWS", 3))

# Dirac-sea sampler: lattice points x modes above this budget are refused.
SEA_BUDGET = _int_from_env("CFS_SEA_BUDGET", _SEA_CONFIG.get("BUDGET", 20_000_000))

# Runtime
THREADS = _int_from_env("CFS_THREADS", _RUNTIME_CONFIG.get("THREADS", 1))
LOG_LEVEL = _env_override("CFS_LOG_LEVEL", _RUNTIME_CONFIG.get("LOG_LEVEL")) or "INFO"
OUTPUT_DIR = _env_override("CFS_OUTPUT_DIR", _RUNTIME_CONFIG.get("OUTPUT_DIR")) or "out"
# Wall-clock seconds column of sweep CSVs; written as 0.0 when off.
RECORD_TIMING = _bool_from_env("CFS_RECORD_TIMING", _RUNTIME_CONFIG.get("RECORD_TIMING", False))
