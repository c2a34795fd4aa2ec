"""Identify polygons and weighted polygon sums from Fourier samples."""

import itertools
import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

import numpy as np

from prony2d.analysis.expoly import ExpPoly2D, torus_reduce
from prony2d.analysis.recover2d import RecoveryReport, recover_auto
from prony2d.analysis.sampling import FourierSampleSet, LatticeSet2D, polygon_grid
from prony2d.analysis.synth import trial_rng
from prony2d.errors import (
    CoefficientStructureError,
    EmptyRegionError,
    InvalidParameterError,
    VerificationError,
)
from prony2d.geometry.fourier import clear_denominators, ft_polygon
from prony2d.geometry.polygon import Polygon, SlopeSet
from prony2d.geometry.reconnect import reconnect_axis_parallel, reconnect_by_slopes

logger = logging.getLogger(__name__)

AREA_TOL = 1e-12
PAIR_TOL = 1e-7
VERIFY_TOL = 1e-8
SNAP_TOL = 1e-9

_FOUR_PI_SQ = 4.0 * np.pi**2


@dataclass(frozen=True)
class SimpleFunction:
    """Weighted sum of polygon indicators; parts may overlap."""

    parts: tuple[tuple[complex, Polygon], ...]
    N: int
    k: int

    def __post_init__(self):
        parts = tuple((complex(w), P) for w, P in self.parts)
        object.__setattr__(self, "parts", parts)
        vertices = sum(len(P) for _, P in parts)
        if vertices > self.N:
            raise InvalidParameterError(f"parts have {vertices} vertices in total, bound is N={self.N}")
        if len(self.slopes()) > self.k:
            raise InvalidParameterError(f"parts use {len(self.slopes())} slopes, bound is k={self.k}")

    def slopes(self) -> SlopeSet:
        if not self.parts:
            return SlopeSet(())
        return SlopeSet.from_vectors(np.concatenate([P.edges() for _, P in self.parts]))

    def subtract(self, other: "SimpleFunction") -> "SimpleFunction":
        """self - other, with the parameters added (2k, 2N for equal bounds)."""
        parts = self.parts + tuple((-w, P) for w, P in other.parts)
        return SimpleFunction(parts, N=self.N + other.N, k=self.k + other.k)


@dataclass(frozen=True)
class Identification:
    polygon: Polygon
    recovery: RecoveryReport
    verification_residual: float

    def to_dict(self) -> dict:
        return {
            "vertices": [list(v) for v in self.polygon.vertices],
            "recovery": self.recovery.to_dict(),
            "verification_residual": self.verification_residual,
        }


def _points(A) -> list[tuple[int, int]]:
    if isinstance(A, LatticeSet2D):
        return list(A.points)
    return [(int(m), int(n)) for m, n in A]


def sample_polygon(P: Polygon, A: LatticeSet2D | Iterable) -> FourierSampleSet:
    points = _points(A)
    return FourierSampleSet(points, ft_polygon(P, points))


def sample_simple_function(F: SimpleFunction, A: LatticeSet2D | Iterable) -> FourierSampleSet:
    points = _points(A)
    values = np.zeros(len(points), dtype=complex)
    for weight, P in F.parts:
        values += weight * ft_polygon(P, points)
    return FourierSampleSet(points, values)


def _as_sample_set(samples: Mapping) -> FourierSampleSet:
    return samples if isinstance(samples, FourierSampleSet) else FourierSampleSet.from_mapping(samples)


def _recover_cleared(samples: Mapping, slopes: SlopeSet, N: int) -> tuple[FourierSampleSet, RecoveryReport]:
    k = len(slopes)
    restricted = _as_sample_set(samples).restrict(polygon_grid(k, N))
    cleared = clear_denominators(restricted, slopes)
    report = recover_auto(cleared, 2 * N, k - 1)
    logger.info("Recovered %d vertex terms from %d samples", len(report.result), len(restricted))
    return restricted, report


def _vertex(x: float, y: float) -> tuple[float, float]:
    coords = []
    for c in (torus_reduce(-x), torus_reduce(-y)):
        coords.append(0.0 if 1.0 - c < SNAP_TOL else c)
    return coords[0], coords[1]


def detect_slope_pairs(f: ExpPoly2D, slopes: SlopeSet, *, seed: int = 0) -> list[tuple[int, int]]:
    """For every term, the two slopes whose linear forms are missing from its coefficient.

    A vertex between slopes a and b has coefficient c * prod_{r != a, b} (s_r . t),
    so c(t) / prod_{r != a, b}(s_r . t) is constant exactly for the incident pair.
    """
    k = len(slopes)
    rng = trial_rng(seed)
    nodes = rng.uniform(-1.0, 1.0, size=(6 * k * k, 2))
    forms = slopes.linear_forms(nodes)
    keep = np.min(np.abs(forms), axis=1) > 1e-3
    nodes, forms = nodes[keep][: 3 * k * k], forms[keep][: 3 * k * k]
    S = slopes.as_array()

    incident = []
    for index, term in enumerate(f.terms):
        values = term.poly(nodes[:, 0], nodes[:, 1])
        passing = []
        for a, b in itertools.combinations(range(k), 2):
            rest = [r for r in range(k) if r not in (a, b)]
            quotient = values / np.prod(forms[:, rest], axis=1)
            peak = float(np.max(np.abs(quotient)))
            if peak > 0 and float(np.max(np.abs(quotient - quotient.mean()))) <= PAIR_TOL * peak:
                passing.append((a, b, complex(quotient.mean())))
        if len(passing) > 1:
            passing = [
                (a, b, c)
                for a, b, c in passing
                if abs(abs(c) * _FOUR_PI_SQ - abs(S[a, 0] * S[b, 1] - S[a, 1] * S[b, 0])) <= 1e-6
            ]
        if len(passing) != 1:
            raise CoefficientStructureError(
                f"term {index} matches {len(passing)} slope pairs", term=index
            )
        incident.append(passing[0][:2])
    return incident


def identify_polygon_report(samples: Mapping, slopes: SlopeSet, N: int) -> Identification:
    if len(slopes) < 2:
        raise InvalidParameterError("identification needs at least two slopes")
    restricted = _as_sample_set(samples).restrict(polygon_grid(len(slopes), N))
    if abs(restricted[(0, 0)]) <= AREA_TOL:
        raise EmptyRegionError("the sample at the origin (the area) is zero")

    restricted, report = _recover_cleared(restricted, slopes, N)
    vertices = [_vertex(t.freq.x, t.freq.y) for t in report.result.terms]
    incident = detect_slope_pairs(report.result, slopes)
    if slopes.is_axis():
        polygon = reconnect_axis_parallel(vertices)
    else:
        polygon = reconnect_by_slopes(vertices, incident, slopes)

    resampled = ft_polygon(polygon, restricted.points)
    residual = float(np.max(np.abs(resampled - restricted.values)))
    if residual > VERIFY_TOL * max(1.0, restricted.max_abs()):
        raise VerificationError(f"re-sampled polygon misses the samples by {residual:.3e}")
    logger.info("Identified a %d-vertex polygon, verification residual %.2e", len(polygon), residual)
    return Identification(polygon, report, residual)


def identify_polygon(samples: Mapping, slopes: SlopeSet, N: int) -> Polygon:
    return identify_polygon_report(samples, slopes, N).polygon


def recover_simple_function_exppoly(samples: Mapping, slopes: SlopeSet, N: int) -> ExpPoly2D:
    """The cleared transform of a weighted polygon sum, as an exponential polynomial."""
    if len(slopes) < 2:
        raise InvalidParameterError("recovery needs at least two slopes")
    _, report = _recover_cleared(samples, slopes, N)
    return report.result
