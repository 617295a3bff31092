"""Log-log figure of a sweep with its fitted power law."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from loguru import logger  # noqa: E402

from src.models.models import FitResult, SweepResult  # noqa: E402
from src.utils.json_output import PathLike  # noqa: E402

# Stable element ids so identical data gives identical SVG bytes.
matplotlib.rcParams["svg.hashsalt"] = "cfs-lab"


def plot_sweep_svg(result: SweepResult, fit: Optional[FitResult], path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    points = [
        (row.m_eps, row.l_eps) for row in result.rows if np.isfinite(row.l_eps) and row.l_eps > 0
    ]

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    try:
        if points:
            x, y = np.asarray(points).T
            ax.loglog(x, y, "o", color="black", label="l_eps")
            if fit is not None:
                grid = np.geomspace(x.min(), x.max(), 64)
                ax.loglog(
                    grid,
                    fit.a * grid**fit.b,
                    "-",
                    color="tab:blue",
                    label=f"fit: {fit.a:.3g} (m eps)^{fit.b:.3f}",
                )
            ax.legend(loc="best")
        else:
            logger.warning("No positive sweep rows to plot; writing empty axes")
            ax.set_xscale("log")
            ax.set_yscale("log")
        ax.set_xlabel("m eps")
        ax.set_ylabel("l_eps")
        ax.grid(True, which="both", linewidth=0.3)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    return path


__all__ = ["plot_sweep_svg"]
