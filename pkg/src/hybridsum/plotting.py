"""Histogram of normalised sums against the limiting Gaussian density, as SVG."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import numpy as np  # noqa: E402
from matplotlib.backends.backend_svg import FigureCanvasSVG  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

N_BINS = 61
X_RANGE = (-4.0, 4.0)


def histogram_svg(path, values, variance: float, title: str = "") -> Path:
    """640x480 SVG: 61-bin density histogram on [-4, 4] with the N(0, variance) curve."""
    path = Path(path)
    values = np.asarray(values, dtype=float)
    with matplotlib.rc_context({"svg.hashsalt": "hybridsum", "svg.fonttype": "none"}):
        fig = Figure(figsize=(6.4, 4.8), dpi=100)
        FigureCanvasSVG(fig)
        ax = fig.add_subplot()
        ax.hist(values, bins=N_BINS, range=X_RANGE, density=True, color="#8fb3d9",
                edgecolor="#4a6f99", linewidth=0.4, label=f"empirical (n={values.size})")
        t = np.linspace(*X_RANGE, 401)
        ax.plot(t, np.exp(-t * t / (2 * variance)) / math.sqrt(2 * math.pi * variance),
                color="#c0392b", linewidth=1.5, label=f"N(0, {variance:g})")
        ax.set_xlim(*X_RANGE)
        ax.set_xlabel("normalised value")
        ax.set_ylabel("density")
        if title:
            ax.set_title(title)
        ax.legend(loc="upper right", frameon=False)
        fig.savefig(path, format="svg", metadata={"Date": None})
    return path
