"""Rebuild a polygon from its vertex set.

Along every line of a given slope, the vertices that have an edge in that
direction are the endpoints of disjoint collinear edges, so sorting them along
the line and pairing neighbours (first with second, third with fourth, ...)
recovers those edges.
"""

import logging

import numpy as np

from prony2d.errors import ParityError, PolygonValidationError, ReconnectionError
from prony2d.geometry.polygon import Polygon, SlopeSet, validate_polygon

logger = logging.getLogger(__name__)

LINE_TOL = 1e-7


def _pair_along(points: np.ndarray, members: list[int], slope: np.ndarray) -> list[tuple[int, int]]:
    offsets = points[members] @ np.array([-slope[1], slope[0]])
    order = np.argsort(offsets, kind="stable")
    lines: list[list[int]] = []
    last = None
    for i in order:
        if last is None or offsets[i] - last > LINE_TOL:
            lines.append([])
        lines[-1].append(members[i])
        last = offsets[i]

    pairs = []
    for line in lines:
        if len(line) % 2:
            raise ParityError(f"{len(line)} vertices on a line of slope {tuple(slope)}", vertices=line)
        line.sort(key=lambda v: float(points[v] @ slope))
        pairs.extend(zip(line[::2], line[1::2]))
    return pairs


def reconnect_by_slopes(vertices, incident: list[tuple[int, int]], slopes: SlopeSet) -> Polygon:
    """Connect vertices given the two slope indices incident to each of them."""
    points = np.asarray(vertices, dtype=float).reshape(-1, 2)
    n = len(points)
    if len(incident) != n:
        raise ReconnectionError(f"{len(incident)} slope pairs for {n} vertices")
    if n < 3:
        raise ParityError(f"{n} vertices cannot bound a polygon")

    partner: list[dict[int, int]] = [{} for _ in range(n)]
    for r, slope in enumerate(slopes.as_array()):
        members = [v for v in range(n) if r in incident[v]]
        for a, b in _pair_along(points, members, slope):
            partner[a][r] = b
            partner[b][r] = a

    cycle = [0]
    slope = incident[0][0]
    current = 0
    while True:
        if slope not in partner[current]:
            raise ReconnectionError(f"vertex {current} has no partner along slope {slope}")
        current = partner[current][slope]
        if current == 0:
            break
        cycle.append(current)
        if len(cycle) > n:
            raise ReconnectionError("edge walk does not close")
        a, b = incident[current]
        slope = b if slope == a else a
    if len(cycle) != n:
        raise ReconnectionError(f"edges form several cycles; the first covers {len(cycle)} of {n} vertices")

    try:
        polygon = validate_polygon(points[cycle])
    except PolygonValidationError as err:
        raise ReconnectionError(f"reconnected curve is not a simple polygon: {err}") from err
    logger.debug("Reconnected %d vertices", n)
    return polygon


def reconnect_axis_parallel(vertices) -> Polygon:
    points = np.asarray(vertices, dtype=float).reshape(-1, 2)
    return reconnect_by_slopes(points, [(0, 1)] * len(points), SlopeSet.axis())
