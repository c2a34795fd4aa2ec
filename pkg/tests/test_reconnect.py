"""Tests for polygon reconnection and random polygon generation."""

import numpy as np
import pytest

from prony2d.analysis.synth import trial_rng
from prony2d.errors import InvalidParameterError, ParityError, ReconnectionError
from prony2d.geometry.generate import random_rectilinear_polygon, random_star_polygon
from prony2d.geometry.polygon import edge_frame, polygon_slopes, validate_polygon
from prony2d.geometry.reconnect import reconnect_axis_parallel, reconnect_by_slopes

STAIRCASE = [
    (0.1, 0.1),
    (0.8, 0.1),
    (0.8, 0.3),
    (0.6, 0.3),
    (0.6, 0.5),
    (0.4, 0.5),
    (0.4, 0.7),
    (0.1, 0.7),
]


def _same_cycle(a, b) -> bool:
    """Equal vertex cycles up to rotation."""
    a, b = [tuple(np.round(v, 9)) for v in a], [tuple(np.round(v, 9)) for v in b]
    if len(a) != len(b) or a[0] not in b:
        return False
    k = b.index(a[0])
    return a == b[k:] + b[:k]


def _incident(P):
    frame = edge_frame(P)
    n = len(P)
    return [(frame.slope_index[(j - 1) % n], frame.slope_index[j]) for j in range(n)], frame.slopes


class TestReconnectAxisParallel:
    def test_staircase_from_shuffled_vertices(self):
        P = validate_polygon(STAIRCASE)
        order = trial_rng(3).permutation(len(STAIRCASE))
        Q = reconnect_axis_parallel([STAIRCASE[i] for i in order])
        assert _same_cycle(Q.vertices, P.vertices)

    def test_odd_count_on_a_line(self):
        with pytest.raises(ParityError):
            reconnect_axis_parallel([(0.1, 0.1), (0.5, 0.1), (0.9, 0.1), (0.5, 0.5)])

    def test_two_disjoint_rectangles(self):
        a = [(0.1, 0.1), (0.3, 0.1), (0.3, 0.3), (0.1, 0.3)]
        b = [(0.6, 0.6), (0.8, 0.6), (0.8, 0.8), (0.6, 0.8)]
        with pytest.raises(ReconnectionError):
            reconnect_axis_parallel(a + b)


class TestReconnectBySlopes:
    def test_triangle(self):
        P = validate_polygon([(0.1, 0.2), (0.7, 0.1), (0.4, 0.8)])
        incident, slopes = _incident(P)
        order = [2, 0, 1]
        Q = reconnect_by_slopes([P.vertices[i] for i in order], [incident[i] for i in order], slopes)
        assert _same_cycle(Q.vertices, P.vertices)

    def test_pentagon_with_parallel_edges(self):
        P = validate_polygon([(0.1, 0.1), (0.6, 0.1), (0.8, 0.4), (0.6, 0.7), (0.1, 0.7)])
        incident, slopes = _incident(P)
        Q = reconnect_by_slopes(P.vertices, incident, slopes)
        assert _same_cycle(Q.vertices, P.vertices)

    def test_wrong_pair_count(self):
        P = validate_polygon([(0.1, 0.2), (0.7, 0.1), (0.4, 0.8)])
        _, slopes = _incident(P)
        with pytest.raises(ReconnectionError):
            reconnect_by_slopes(P.vertices, [(0, 1)], slopes)


class TestRandomRectilinear:
    def test_generated_polygons_are_axis_parallel(self):
        for i in range(20):
            P = random_rectilinear_polygon(trial_rng(11, i), 10)
            assert 4 <= len(P) <= 10
            assert len(P) % 2 == 0
            assert polygon_slopes(P).is_axis()
            V = P.as_array()
            assert np.all((V > 0) & (V < 1))

    def test_reproducible(self):
        a = random_rectilinear_polygon(trial_rng(5, 2), 12)
        b = random_rectilinear_polygon(trial_rng(5, 2), 12)
        assert a == b

    def test_too_few_vertices(self):
        with pytest.raises(InvalidParameterError):
            random_rectilinear_polygon(trial_rng(0), 3)


class TestRandomStar:
    def test_exact_vertex_count(self):
        for n in (3, 5, 9):
            P = random_star_polygon(trial_rng(2, n), n)
            assert len(P) == n

    def test_needs_three_vertices(self):
        with pytest.raises(InvalidParameterError):
            random_star_polygon(trial_rng(0), 2)
