"""Tests for polygon identification from Fourier samples."""

import numpy as np
import pytest

from prony2d.analysis.expoly import ExpPoly2D, Term2D, canonicalize, exppoly2d_allclose
from prony2d.analysis.sampling import FourierSampleSet, LatticeSet2D, polygon_grid
from prony2d.analysis.synth import trial_rng
from prony2d.errors import EmptyRegionError, InvalidParameterError, MissingSamplePointsError
from prony2d.geometry.fourier import assemble_fp
from prony2d.geometry.polygon import SlopeSet, polygon_slopes, validate_polygon
from prony2d.pipeline.identify import (
    SimpleFunction,
    detect_slope_pairs,
    identify_polygon,
    identify_polygon_report,
    recover_simple_function_exppoly,
    sample_polygon,
    sample_simple_function,
)

SQUARE = validate_polygon([(0.25, 0.25), (0.75, 0.25), (0.75, 0.75), (0.25, 0.75)])
STAIRCASE = validate_polygon(
    [(0.1, 0.1), (0.8, 0.1), (0.8, 0.3), (0.6, 0.3), (0.6, 0.5), (0.4, 0.5), (0.4, 0.7), (0.1, 0.7)]
)
TRIANGLE = validate_polygon([(0.1, 0.2), (0.7, 0.1), (0.4, 0.8)])
RECT_A = validate_polygon([(0.1, 0.1), (0.5, 0.1), (0.5, 0.4), (0.1, 0.4)])
RECT_B = validate_polygon([(0.3, 0.2), (0.7, 0.2), (0.7, 0.6), (0.3, 0.6)])
L_SHAPE = validate_polygon([(0.1, 0.1), (0.7, 0.1), (0.7, 0.4), (0.4, 0.4), (0.4, 0.8), (0.1, 0.8)])


def _aligned_error(P, Q) -> float:
    """Largest vertex distance after rotating Q to start at P's first vertex."""
    if len(P) != len(Q):
        return float("inf")
    A, B = P.as_array(), Q.as_array()
    k = int(np.argmin(np.linalg.norm(B - A[0], axis=1)))
    return float(np.max(np.abs(np.roll(B, -k, axis=0) - A)))


def _scaled(f: ExpPoly2D, weight: complex) -> ExpPoly2D:
    return ExpPoly2D(tuple(Term2D(t.freq, t.poly.scale(weight)) for t in f.terms), D=f.D)


def _midpoint(a: float, b: float, t: float, cells: int = 16384) -> complex:
    """Midpoint rule for the integral of exp(-2 pi i x t) over [a, b]."""
    h = (b - a) / cells
    x = a + h * (np.arange(cells) + 0.5)
    return complex(h * np.sum(np.exp(-2j * np.pi * x * t)))


class TestSampling:
    def test_origin_sample_is_area(self):
        samples = sample_polygon(SQUARE, polygon_grid(2, 1))
        assert samples[(0, 0)] == pytest.approx(0.25)

    def test_single_part_matches_polygon(self):
        A = polygon_grid(2, 2)
        F = SimpleFunction(((1.0, SQUARE),), N=4, k=2)
        assert np.allclose(sample_simple_function(F, A).values, sample_polygon(SQUARE, A).values)

    def test_half_weights_of_one_polygon(self):
        A = polygon_grid(2, 2)
        F = SimpleFunction(((0.5, SQUARE), (0.5, SQUARE)), N=8, k=2)
        assert np.allclose(sample_simple_function(F, A).values, sample_polygon(SQUARE, A).values)

    def test_cancellation(self):
        F = SimpleFunction(((1.0, SQUARE), (-1.0, SQUARE)), N=8, k=2)
        assert np.max(np.abs(sample_simple_function(F, polygon_grid(2, 2)).values)) < 1e-15

    def test_linearity(self):
        A = polygon_grid(2, 4)
        F = SimpleFunction(((2.0, RECT_A), (-1j, RECT_B)), N=8, k=2)
        expected = 2.0 * sample_polygon(RECT_A, A).values - 1j * sample_polygon(RECT_B, A).values
        assert np.max(np.abs(sample_simple_function(F, A).values - expected)) < 1e-12

    def test_l_shape_matches_midpoint_rule(self):
        # the L-shape split into [0.1, 0.7] x [0.1, 0.4] and [0.1, 0.4] x [0.4, 0.8]
        points = polygon_grid(2, 3).points
        chosen = [points[i] for i in trial_rng(11).choice(len(points), size=3, replace=False)]
        values = sample_polygon(L_SHAPE, chosen).values
        for (m, n), value in zip(chosen, values):
            expected = _midpoint(0.1, 0.7, m) * _midpoint(0.1, 0.4, n) + _midpoint(0.1, 0.4, m) * _midpoint(0.4, 0.8, n)
            assert abs(value - expected) < 1e-6


class TestSimpleFunction:
    def test_vertex_bound(self):
        with pytest.raises(InvalidParameterError):
            SimpleFunction(((1.0, STAIRCASE),), N=4, k=2)

    def test_slope_bound(self):
        with pytest.raises(InvalidParameterError):
            SimpleFunction(((1.0, TRIANGLE),), N=3, k=2)

    def test_subtraction_doubles_parameters(self):
        F = SimpleFunction(((1.0, RECT_A),), N=4, k=2)
        G = SimpleFunction(((1.0, TRIANGLE),), N=4, k=3)
        H = F.subtract(G)
        assert (H.N, H.k) == (8, 5)
        assert len(H.parts) == 2
        assert H.parts[1][0] == -1.0


class TestIdentifyPolygon:
    def test_square(self):
        Q = identify_polygon(sample_polygon(SQUARE, polygon_grid(2, 4)), SlopeSet.axis(), 4)
        assert _aligned_error(SQUARE, Q) < 1e-6

    def test_staircase(self):
        Q = identify_polygon(sample_polygon(STAIRCASE, polygon_grid(2, 8)), SlopeSet.axis(), 8)
        assert _aligned_error(STAIRCASE, Q) < 1e-6

    def test_triangle_with_known_slopes(self):
        slopes = polygon_slopes(TRIANGLE)
        found = identify_polygon_report(sample_polygon(TRIANGLE, polygon_grid(3, 3)), slopes, 3)
        assert _aligned_error(TRIANGLE, found.polygon) < 1e-6
        assert found.verification_residual < 1e-8

    def test_extra_samples_are_ignored(self):
        A = polygon_grid(2, 5)
        Q = identify_polygon(sample_polygon(SQUARE, A), SlopeSet.axis(), 4)
        assert _aligned_error(SQUARE, Q) < 1e-6

    def test_zero_samples(self):
        A = polygon_grid(2, 4)
        with pytest.raises(EmptyRegionError):
            identify_polygon(FourierSampleSet(A.points, np.zeros(len(A))), SlopeSet.axis(), 4)

    def test_missing_points(self):
        A = polygon_grid(2, 4)
        partial = LatticeSet2D(A.points[:-3])
        with pytest.raises(MissingSamplePointsError):
            identify_polygon(sample_polygon(SQUARE, partial), SlopeSet.axis(), 4)

    def test_report_dict(self):
        found = identify_polygon_report(sample_polygon(SQUARE, polygon_grid(2, 4)), SlopeSet.axis(), 4)
        data = found.to_dict()
        assert len(data["vertices"]) == 4
        assert data["recovery"]["candidates_tried"] >= 1


class TestSlopePairs:
    def test_triangle_pairs_follow_edges(self):
        slopes = polygon_slopes(TRIANGLE)
        pairs = detect_slope_pairs(assemble_fp(TRIANGLE, slopes), slopes)
        assert [set(p) for p in pairs] == [{2, 0}, {0, 1}, {1, 2}]


class TestRecoverSimpleFunction:
    def test_single_square_matches_assembly(self):
        f = recover_simple_function_exppoly(sample_polygon(SQUARE, polygon_grid(2, 4)), SlopeSet.axis(), 4)
        assert exppoly2d_allclose(f, assemble_fp(SQUARE))

    def test_complex_weight_scales_coefficients(self):
        F = SimpleFunction(((2 + 1j, SQUARE),), N=4, k=2)
        f = recover_simple_function_exppoly(sample_simple_function(F, polygon_grid(2, 4)), SlopeSet.axis(), 4)
        assert exppoly2d_allclose(f, _scaled(assemble_fp(SQUARE), 2 + 1j))

    def test_overlapping_rectangles(self):
        F = SimpleFunction(((1.0, RECT_A), (1.0, RECT_B)), N=8, k=2)
        f = recover_simple_function_exppoly(sample_simple_function(F, polygon_grid(2, 8)), SlopeSet.axis(), 8)
        fa, fb = assemble_fp(RECT_A), assemble_fp(RECT_B)
        expected = canonicalize(ExpPoly2D(fa.terms + fb.terms, D=1))
        assert exppoly2d_allclose(f, expected)
