"""Polygon model, validation, slopes and edge frames."""

import logging
from dataclasses import dataclass

import mapbox_earcut
import numpy as np
import shapely

from prony2d.errors import InvalidParameterError, PolygonValidationError

logger = logging.getLogger(__name__)

COLLINEAR_TOL = 1e-9
DUPLICATE_TOL = 1e-12
PARALLEL_TOL = 1e-9


@dataclass(frozen=True)
class Violation:
    kind: str
    vertices: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.kind} at vertices {', '.join(str(v) for v in self.vertices)}"


@dataclass(frozen=True)
class Polygon:
    """Counterclockwise vertex cycle; build through validate_polygon."""

    vertices: tuple[tuple[float, float], ...]

    def __len__(self) -> int:
        return len(self.vertices)

    def as_array(self) -> np.ndarray:
        return np.array(self.vertices, dtype=float).reshape(-1, 2)

    def edges(self) -> np.ndarray:
        """w_j = v_{j+1} - v_j, indices mod n."""
        V = self.as_array()
        return np.roll(V, -1, axis=0) - V


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def shoelace_area(P: Polygon | np.ndarray) -> float:
    """Signed area, positive for counterclockwise order."""
    V = P.as_array() if isinstance(P, Polygon) else np.asarray(P, dtype=float)
    return 0.5 * float(np.sum(_cross(V, np.roll(V, -1, axis=0))))


def find_violations(raw, *, bounded: bool = True) -> list[Violation]:
    V = np.asarray(raw, dtype=float).reshape(-1, 2)
    n = len(V)
    if n < 3:
        return [Violation("too-few-vertices", tuple(range(n)))]

    violations = []
    if bounded:
        outside = np.nonzero(np.any((V < 0.0) | (V >= 1.0), axis=1))[0]
        violations += [Violation("out-of-range", (int(i),)) for i in outside]

    for i in range(n):
        for j in range(i + 1, n):
            if np.max(np.abs(V[i] - V[j])) <= DUPLICATE_TOL:
                violations.append(Violation("duplicate-vertex", (i, j)))
    if any(v.kind == "duplicate-vertex" for v in violations):
        return violations

    incoming = V - np.roll(V, 1, axis=0)
    outgoing = np.roll(V, -1, axis=0) - V
    sine = np.abs(_cross(incoming, outgoing)) / (
        np.linalg.norm(incoming, axis=1) * np.linalg.norm(outgoing, axis=1)
    )
    for j in np.nonzero(sine <= COLLINEAR_TOL)[0]:
        violations.append(Violation("collinear", ((int(j) - 1) % n, int(j), (int(j) + 1) % n)))

    segments = shapely.linestrings(np.stack([V, np.roll(V, -1, axis=0)], axis=1))
    pairs = [(i, j) for i in range(n) for j in range(i + 2, n) if not (i == 0 and j == n - 1)]
    if pairs:
        first, second = np.array(pairs).T
        hits = shapely.intersects(segments[first], segments[second])
        for i, j in zip(first[hits], second[hits]):
            violations.append(Violation("self-intersection", (int(i), (int(i) + 1) % n, int(j), (int(j) + 1) % n)))
    return violations


def validate_polygon(raw, *, bounded: bool = True) -> Polygon:
    """Check simplicity, redundancy and range; return the counterclockwise polygon.

    ``bounded=False`` lifts the [0, 1)^2 requirement for transforms of
    polygons that are never mapped to torus frequencies.
    """
    violations = find_violations(raw, bounded=bounded)
    if violations:
        raise PolygonValidationError(violations)
    V = np.asarray(raw, dtype=float).reshape(-1, 2)
    if shoelace_area(V) < 0:
        V = np.concatenate([V[:1], V[:0:-1]])
    return Polygon(tuple((float(x), float(y)) for x, y in V))


def triangulate(P: Polygon) -> np.ndarray:
    """Ear-clipping triangulation as an array of shape (n - 2, 3, 2)."""
    V = P.as_array()
    index = mapbox_earcut.triangulate_float64(V, np.array([len(V)], dtype=np.uint32))
    return V[np.asarray(index, dtype=int).reshape(-1, 3)]


def _canonical(u: np.ndarray) -> np.ndarray:
    u = u / np.linalg.norm(u)
    if u[0] < -PARALLEL_TOL or (abs(u[0]) <= PARALLEL_TOL and u[1] < 0):
        u = -u
    return u + 0.0


@dataclass(frozen=True)
class SlopeSet:
    """Pairwise non-parallel unit vectors with first nonzero coordinate positive."""

    slopes: tuple[tuple[float, float], ...]

    def __post_init__(self):
        canon = [tuple(float(c) for c in _canonical(np.asarray(s, dtype=float))) for s in self.slopes]
        for a in range(len(canon)):
            for b in range(a + 1, len(canon)):
                if abs(_cross(np.array(canon[a]), np.array(canon[b]))) <= PARALLEL_TOL:
                    raise InvalidParameterError(f"slopes {a} and {b} are parallel")
        object.__setattr__(self, "slopes", tuple(canon))

    @classmethod
    def axis(cls) -> "SlopeSet":
        return cls(((1.0, 0.0), (0.0, 1.0)))

    @classmethod
    def from_vectors(cls, vectors) -> "SlopeSet":
        """Deduplicate directions up to sign, keeping first-seen order."""
        kept: list[np.ndarray] = []
        for v in np.asarray(vectors, dtype=float).reshape(-1, 2):
            u = _canonical(v)
            if not any(abs(_cross(u, s)) <= PARALLEL_TOL for s in kept):
                kept.append(u)
        return cls(tuple(tuple(u) for u in kept))

    def __len__(self) -> int:
        return len(self.slopes)

    def __iter__(self):
        return iter(self.slopes)

    def as_array(self) -> np.ndarray:
        return np.array(self.slopes, dtype=float).reshape(-1, 2)

    def is_axis(self) -> bool:
        return len(self) == 2 and {self.slopes[0], self.slopes[1]} == {(1.0, 0.0), (0.0, 1.0)}

    def locate(self, direction) -> tuple[int, int]:
        """(r, eps) with direction / |direction| == eps * s_r."""
        u = np.asarray(direction, dtype=float)
        u = u / np.linalg.norm(u)
        for r, s in enumerate(self.as_array()):
            if abs(_cross(s, u)) <= PARALLEL_TOL:
                return r, 1 if float(s @ u) > 0 else -1
        raise InvalidParameterError(f"direction {tuple(u)} is not parallel to any slope")

    def linear_forms(self, points) -> np.ndarray:
        """s_r . t for every point (rows) and slope (columns)."""
        return np.asarray(points, dtype=float).reshape(-1, 2) @ self.as_array().T


@dataclass(frozen=True)
class EdgeFrame:
    directions: tuple[tuple[float, float], ...]
    slopes: SlopeSet
    signs: tuple[int, ...]
    slope_index: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.slopes)


def edge_frame(P: Polygon, slopes: SlopeSet | None = None) -> EdgeFrame:
    W = P.edges()
    U = W / np.linalg.norm(W, axis=1)[:, None]
    if slopes is None:
        slopes = SlopeSet.from_vectors(U)
    located = [slopes.locate(u) for u in U]
    return EdgeFrame(
        directions=tuple(tuple(float(c) for c in u) for u in U),
        slopes=slopes,
        signs=tuple(eps for _, eps in located),
        slope_index=tuple(r for r, _ in located),
    )


def polygon_slopes(P: Polygon) -> SlopeSet:
    return edge_frame(P).slopes
