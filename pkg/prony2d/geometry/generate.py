"""Random valid polygons for campaigns and the gen-polygon command."""

import logging

import numpy as np
import shapely
from shapely.geometry import box
from shapely.geometry.polygon import orient

from prony2d.analysis.synth import spread_points
from prony2d.errors import InvalidParameterError, PolygonValidationError
from prony2d.geometry.polygon import Polygon, validate_polygon

logger = logging.getLogger(__name__)

GRID = 16
_NEIGHBOURS = ((1, 0), (-1, 0), (0, 1), (0, -1))


def _cell(c: tuple[int, int]):
    return box(c[0], c[1], c[0] + 1, c[1] + 1)


def _outline(shape) -> list[tuple[int, int]]:
    """Counterclockwise corners of a polyomino with straight-through vertices removed."""
    ring = [(round(x), round(y)) for x, y in orient(shape.simplify(0), sign=1.0).exterior.coords[:-1]]
    changed = True
    while changed and len(ring) > 3:
        changed = False
        for i in range(len(ring)):
            (ax, ay), (bx, by), (cx, cy) = ring[i - 1], ring[i], ring[(i + 1) % len(ring)]
            if (bx - ax) * (cy - by) - (by - ay) * (cx - bx) == 0:
                del ring[i]
                changed = True
                break
    return ring


def _acceptable(shape, max_vertices: int) -> bool:
    return (
        shape.geom_type == "Polygon"
        and shape.is_valid
        and not shape.interiors
        and len(_outline(shape)) <= max_vertices
    )


def random_rectilinear_polygon(
    rng: np.random.Generator,
    max_vertices: int = 12,
    *,
    grid: int = GRID,
    max_cells: int | None = None,
) -> Polygon:
    """Grow a simply connected polyomino cell by cell, then scale its outline into (0, 1)^2."""
    if max_vertices < 4:
        raise InvalidParameterError(f"an axis-parallel polygon needs at least 4 vertices, got {max_vertices}")
    target = int(rng.integers(1, (max_cells or 2 * max_vertices) + 1))
    start = (int(rng.integers(grid)), int(rng.integers(grid)))
    cells = {start}
    rejected: set[tuple[int, int]] = set()
    shape = _cell(start)

    while len(cells) < target:
        frontier = sorted(
            {(x + dx, y + dy) for x, y in cells for dx, dy in _NEIGHBOURS} - cells - rejected
        )
        frontier = [c for c in frontier if 0 <= c[0] < grid and 0 <= c[1] < grid]
        if not frontier:
            break
        cell = frontier[int(rng.integers(len(frontier)))]
        candidate = shapely.union_all([shape, _cell(cell)])
        if _acceptable(candidate, max_vertices):
            shape = candidate
            cells.add(cell)
        else:
            rejected.add(cell)

    outline = _outline(shape)
    scale = grid + 1
    logger.debug("Polyomino with %d cells, %d vertices", len(cells), len(outline))
    return validate_polygon([((x + 0.5) / scale, (y + 0.5) / scale) for x, y in outline])


def random_star_polygon(rng: np.random.Generator, n: int, *, max_tries: int = 100) -> Polygon:
    """Vertices at increasing angles around a random centre, random radii."""
    if n < 3:
        raise InvalidParameterError(f"a polygon needs at least 3 vertices, got {n}")
    for _ in range(max_tries):
        center = rng.uniform(0.3, 0.7, size=2)
        angles = 2 * np.pi * np.array(spread_points(rng, n, 0.5 / n))
        radii = rng.uniform(0.1, 0.28, size=n)
        V = center + radii[:, None] * np.column_stack([np.cos(angles), np.sin(angles)])
        try:
            return validate_polygon(V)
        except PolygonValidationError:
            continue
    raise InvalidParameterError(f"no valid {n}-vertex star polygon after {max_tries} draws")
