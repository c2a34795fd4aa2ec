"""Predetermined lattice sampling sets and sampled-value containers."""

import logging
import math
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field

import numpy as np

from prony2d.errors import InvalidParameterError, MissingSamplePointsError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LatticeSet1D:
    points: tuple[int, ...]

    def __post_init__(self):
        pts = tuple(int(p) for p in self.points)
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise InvalidParameterError("LatticeSet1D points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[int]:
        return iter(self.points)


@dataclass(frozen=True)
class LatticeSet2D:
    points: tuple[tuple[int, int], ...]
    _lookup: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = tuple(sorted({(int(m), int(n)) for m, n in self.points}))
        if any(m < 0 or n < 0 for m, n in pts):
            raise InvalidParameterError("lattice points must be nonnegative")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_lookup", frozenset(pts))

    @classmethod
    def from_rectangles(cls, rectangles: Iterable[tuple[int, int]]) -> "LatticeSet2D":
        """Union of the rectangles [w]_0 x [h]_0."""
        blocks = []
        for w, h in rectangles:
            mm, nn = np.meshgrid(np.arange(w + 1), np.arange(h + 1), indexing="ij")
            blocks.append(np.column_stack([mm.ravel(), nn.ravel()]))
        if not blocks:
            return cls(())
        unique = np.unique(np.concatenate(blocks), axis=0)
        return cls(tuple(map(tuple, unique.tolist())))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.points)

    def __contains__(self, point) -> bool:
        return tuple(point) in self._lookup

    def issubset(self, other: "LatticeSet2D") -> bool:
        return self._lookup <= other._lookup

    def as_array(self) -> np.ndarray:
        return np.array(self.points, dtype=int).reshape(-1, 2)


class FourierSampleSet(Mapping):
    """Lattice point -> complex value, iterated in lexicographic point order."""

    def __init__(self, points: Iterable[tuple[int, int]], values: Iterable[complex]):
        pts = [(int(m), int(n)) for m, n in points]
        vals = np.asarray(list(values), dtype=complex)
        if len(pts) != len(vals):
            raise InvalidParameterError(f"{len(pts)} points but {len(vals)} values")
        order = sorted(range(len(pts)), key=lambda i: pts[i])
        self._points = tuple(pts[i] for i in order)
        self._values = vals[order] if len(order) else vals
        self._values.setflags(write=False)
        self._index = {p: i for i, p in enumerate(self._points)}
        if len(self._index) != len(self._points):
            raise InvalidParameterError("duplicate sample points")

    @classmethod
    def from_mapping(cls, mapping: Mapping) -> "FourierSampleSet":
        return cls(list(mapping.keys()), list(mapping.values()))

    @property
    def points(self) -> tuple[tuple[int, int], ...]:
        return self._points

    @property
    def values(self) -> np.ndarray:
        return self._values

    def __getitem__(self, point) -> complex:
        return complex(self._values[self._index[tuple(point)]])

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self._points)

    def __len__(self) -> int:
        return len(self._points)

    def lattice(self) -> LatticeSet2D:
        return LatticeSet2D(self._points)

    def restrict(self, lattice: LatticeSet2D) -> "FourierSampleSet":
        require_points(self, lattice)
        return FourierSampleSet(lattice.points, [self[p] for p in lattice.points])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self._values))) if len(self._values) else 0.0


def require_points(samples: Mapping, lattice: Iterable[tuple[int, int]]) -> None:
    missing = [p for p in lattice if p not in samples]
    if missing:
        raise MissingSamplePointsError(missing)


def _check_positive(**params: int) -> None:
    for name, value in params.items():
        if not isinstance(value, (int, np.integer)) or value < 1:
            raise InvalidParameterError(f"{name} must be a positive integer, got {value!r}")


def univariate_grid(N: int, D: int) -> LatticeSet1D:
    _check_positive(N=N, D=D)
    return LatticeSet1D(tuple(range(2 * N * D + 1)))


def coefficient_grid(D: int) -> LatticeSet2D:
    _check_positive(D=D)
    return LatticeSet2D.from_rectangles([(D, D)])


def unifreq_grid(N: int, D: int) -> LatticeSet2D:
    _check_positive(N=N, D=D)
    return LatticeSet2D.from_rectangles([(2 * N * D, D)])


def stage_rectangle(N: int, D: int, t: int) -> tuple[int, int]:
    """Width and height of the t-th rectangle of the layered set A_N."""
    return 2 * (N // t) * D, 2 * t * D


def layered_grid(N: int, D: int) -> LatticeSet2D:
    _check_positive(N=N, D=D)
    return LatticeSet2D.from_rectangles(stage_rectangle(N, D, r) for r in range(1, N + 1))


def polygon_grid(k: int, N: int) -> LatticeSet2D:
    if not isinstance(k, (int, np.integer)) or k < 2:
        raise InvalidParameterError(f"a polygon has at least 2 slopes, got k={k!r}")
    _check_positive(N=N)
    return LatticeSet2D.from_rectangles(stage_rectangle(2 * N, k - 1, r) for r in range(1, N + 1))


def layered_grid_size(N: int, D: int) -> int:
    """Cardinality of layered_grid(N, D) counted column by column."""
    _check_positive(N=N, D=D)
    widest = stage_rectangle(N, D, 1)[0]
    heights = np.full(widest + 1, -1, dtype=np.int64)
    for r in range(1, N + 1):
        w, h = stage_rectangle(N, D, r)
        np.maximum(heights[: w + 1], h, out=heights[: w + 1])
    return int(np.sum(heights + 1))


def sampling_set_size_constant(N_max: int = 256, D_max: int = 4) -> float:
    """Smallest C with |layered_grid(N, D)| <= C * D^2 * N * (1 + ln N) over the given range."""
    worst = 0.0
    for D in range(1, D_max + 1):
        for N in range(1, N_max + 1):
            ratio = layered_grid_size(N, D) / (D * D * N * (1 + math.log(N)))
            worst = max(worst, ratio)
    logger.debug("Size constant over N<=%d, D<=%d: %.4f", N_max, D_max, worst)
    return worst
