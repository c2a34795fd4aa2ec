"""SVG inspection plots of a polygon and, optionally, its sampling lattice."""

import logging
from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.figure import Figure
from matplotlib.patches import Polygon as PolygonPatch

from prony2d.analysis.sampling import LatticeSet2D
from prony2d.geometry.polygon import Polygon

logger = logging.getLogger(__name__)

FILL_OPACITY = 0.3


def _draw_polygon(ax, P: Polygon) -> None:
    V = P.as_array()
    ax.add_patch(PolygonPatch(V, closed=True, facecolor="tab:blue", alpha=FILL_OPACITY, edgecolor="none"))
    ax.add_patch(PolygonPatch(V, closed=True, fill=False, edgecolor="tab:blue", linewidth=1.2))
    ax.plot(V[:, 0], V[:, 1], "o", color="tab:blue", markersize=3)
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_aspect("equal")
    ax.set_title(f"{len(P)} vertices")


def _draw_lattice(ax, A: LatticeSet2D, label: str) -> None:
    pts = A.as_array()
    # marker area grows with log(1 + m + n)
    sizes = 4.0 * np.log1p(pts.sum(axis=1)) + 1.0
    ax.scatter(pts[:, 0], pts[:, 1], s=sizes, facecolors="none", edgecolors="tab:red", linewidths=0.6)
    ax.set_xlabel("m")
    ax.set_ylabel("n")
    ax.set_title(f"{label} ({len(A)} points)" if label else f"{len(A)} points")


def render_svg(path: str | Path, P: Polygon, A: LatticeSet2D | None = None, *, label: str = "") -> Path:
    """Write the polygon (and the lattice in a second panel) as an SVG file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    panels = 1 if A is None else 2
    with matplotlib.rc_context({"svg.hashsalt": "prony2d", "svg.fonttype": "none"}):
        fig = Figure(figsize=(4.5 * panels, 4.5))
        axes = fig.subplots(1, panels, squeeze=False)[0]
        _draw_polygon(axes[0], P)
        if A is not None:
            _draw_lattice(axes[1], A, label)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
    logger.info("Plot written to %s", path)
    return path
