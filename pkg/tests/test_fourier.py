"""Tests for polygon Fourier transforms and the cleared vertex expansion."""

import numpy as np
import pytest

from prony2d.analysis.sampling import FourierSampleSet, polygon_grid
from prony2d.errors import SingularDirectionError
from prony2d.geometry.fourier import (
    assemble_fp,
    bb_transform,
    clear_denominators,
    ft_polygon,
    ft_triangle_oracle,
    vertex_coefficient,
)
from prony2d.geometry.polygon import SlopeSet, polygon_slopes, shoelace_area, validate_polygon

SQUARE = validate_polygon([(0.25, 0.25), (0.75, 0.25), (0.75, 0.75), (0.25, 0.75)])
L_SHAPE = validate_polygon([(0.1, 0.1), (0.7, 0.1), (0.7, 0.4), (0.4, 0.4), (0.4, 0.8), (0.1, 0.8)])
TRIANGLE = validate_polygon([(0.1, 0.2), (0.7, 0.1), (0.4, 0.8)])


def _interval(a: float, b: float, t: float) -> complex:
    if t == 0:
        return b - a
    return (np.exp(-2j * np.pi * b * t) - np.exp(-2j * np.pi * a * t)) / (-2j * np.pi * t)


def _square_transform(t) -> complex:
    return _interval(0.25, 0.75, t[0]) * _interval(0.25, 0.75, t[1])


class TestTriangleOracle:
    def test_origin_is_area(self):
        for P in (SQUARE, L_SHAPE, TRIANGLE):
            assert ft_triangle_oracle(P, (0.0, 0.0)) == pytest.approx(shoelace_area(P), abs=1e-12)

    def test_square_closed_form(self):
        for t in [(0.3, 1.7), (3.0, 0.0), (-2.0, 5.0), (0.0, 0.0)]:
            assert ft_triangle_oracle(SQUARE, t) == pytest.approx(_square_transform(t), abs=1e-12)

    def test_conjugate_symmetry(self):
        for t in [(1.0, 2.0), (-3.0, 4.0)]:
            a = ft_triangle_oracle(L_SHAPE, t)
            b = ft_triangle_oracle(L_SHAPE, (-t[0], -t[1]))
            assert a == pytest.approx(np.conj(b), abs=1e-12)

    def test_vectorized(self):
        points = [(0, 0), (1, 2), (4, -1)]
        values = ft_polygon(TRIANGLE, points)
        assert values.shape == (3,)
        assert values[1] == pytest.approx(ft_triangle_oracle(TRIANGLE, (1, 2)))


class TestVertexSum:
    def test_matches_oracle_on_nonconvex_polygon(self):
        for t in [(0.37, 1.21), (2.5, -3.1), (-7.3, 0.4)]:
            exact = ft_triangle_oracle(L_SHAPE, t)
            assert abs(bb_transform(L_SHAPE, t) - exact) < 1e-9 * (1 + abs(exact))

    def test_singular_direction(self):
        with pytest.raises(SingularDirectionError):
            bb_transform(SQUARE, (1.0, 0.0))


class TestClearedExpansion:
    def test_square_corner_coefficient(self):
        coeff = vertex_coefficient(SQUARE, 0)
        assert coeff.coeffs[0, 0] == pytest.approx(-1 / (4 * np.pi**2))

    def test_triangle_coefficients_are_linear(self):
        for j in range(3):
            assert vertex_coefficient(TRIANGLE, j).degree_bound == 2

    def test_assembled_matches_cleared_samples(self):
        for P in (SQUARE, L_SHAPE, TRIANGLE):
            slopes = polygon_slopes(P)
            A = polygon_grid(len(slopes), len(P))
            samples = FourierSampleSet(A.points, ft_polygon(P, A.points))
            cleared = clear_denominators(samples, slopes)
            f = assemble_fp(P, slopes)
            assert np.max(np.abs(f.evaluate(A.as_array()) - cleared.values)) < 1e-10

    def test_axis_polygon_vanishes_on_axes(self):
        f = assemble_fp(L_SHAPE)
        points = [(0, n) for n in range(6)] + [(m, 0) for m in range(6)]
        assert np.max(np.abs(f.evaluate(points))) < 1e-12

    def test_frequencies_are_negated_vertices(self):
        f = assemble_fp(SQUARE, SlopeSet.axis())
        assert {(t.freq.x, t.freq.y) for t in f.terms} == {(0.75, 0.75), (0.25, 0.75), (0.25, 0.25), (0.75, 0.25)}
        assert f.D == 1
        assert f.N == 4
