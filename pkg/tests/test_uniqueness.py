"""Tests for uniqueness reports, the f_lambda family and campaigns."""

import json

import numpy as np
import pytest

from prony2d.analysis.expoly import ExpPoly2D, canonicalize, exppoly2d_allclose, linear_combine
from prony2d.analysis.sampling import LatticeSet2D, layered_grid
from prony2d.analysis.synth import random_exppoly2d, trial_rng
from prony2d.errors import InvalidParameterError
from prony2d.geometry.polygon import validate_polygon
from prony2d.pipeline import uniqueness
from prony2d.pipeline.uniqueness import (
    f_lambda_family_check,
    find_vanishing_difference,
    run_exppoly_uniqueness_campaign,
    run_polygon_uniqueness_campaign,
    verify_uniqueness,
)

SQUARE = validate_polygon([(0.25, 0.25), (0.75, 0.25), (0.75, 0.75), (0.25, 0.75)])
SHIFTED = validate_polygon([(0.375, 0.25), (0.875, 0.25), (0.875, 0.75), (0.375, 0.75)])
STAIRCASE = validate_polygon(
    [(0.1, 0.1), (0.8, 0.1), (0.8, 0.3), (0.6, 0.3), (0.6, 0.5), (0.4, 0.5), (0.4, 0.7), (0.1, 0.7)]
)


def _agreeing_pair(A: LatticeSet2D, seed: int = 0):
    f1 = random_exppoly2d(trial_rng(seed), 3, 1)
    g = find_vanishing_difference(A, rng=trial_rng(seed, 1))
    f2 = canonicalize(ExpPoly2D(f1.terms + g.terms, D=1))
    return f1, f2


class TestVerifyUniqueness:
    def test_identical_polygons(self):
        report = verify_uniqueness(SQUARE, SQUARE, 2, 4)
        assert report.max_difference == 0.0
        assert report.verdict == "indistinguishable-on-set"

    def test_translated_square(self):
        report = verify_uniqueness(SQUARE, SHIFTED, 2, 4, "known")
        assert report.verdict == "distinct-confirmed"
        assert report.argmax in uniqueness.polygon_grid(2, 4)

    def test_unknown_mode_uses_doubled_set(self):
        report = verify_uniqueness(SQUARE, SHIFTED, 2, 4, "unknown")
        assert report.sampling_set == "polygon:4,8"
        assert report.set_size == len(uniqueness.polygon_grid(4, 8))

    def test_vertex_bound(self):
        with pytest.raises(InvalidParameterError):
            verify_uniqueness(STAIRCASE, SQUARE, 2, 4)

    def test_slope_bound(self):
        triangle = validate_polygon([(0.1, 0.2), (0.7, 0.1), (0.4, 0.8)])
        with pytest.raises(InvalidParameterError):
            verify_uniqueness(triangle, SQUARE, 2, 4)

    def test_unknown_mode_name(self):
        with pytest.raises(InvalidParameterError):
            verify_uniqueness(SQUARE, SQUARE, 2, 4, "sideways")

    def test_report_dict(self):
        data = verify_uniqueness(SQUARE, SHIFTED, 2, 4).to_dict()
        assert data["verdict"] == "distinct-confirmed"
        assert len(data["argmax"]) == 2


class TestVanishingDifference:
    def test_missing_residue(self):
        A = LatticeSet2D.from_rectangles([(2, 5)])
        g = find_vanishing_difference(A)
        assert len(g) == 4
        assert np.max(np.abs(g.evaluate(A.as_array()))) < 1e-12
        assert abs(g(3.0, 0.0)) == pytest.approx(4.0)

    def test_null_space_construction(self):
        A = layered_grid(2, 1)
        g = find_vanishing_difference(A, rng=trial_rng(4), max_period=1)
        assert len(g) == len(A) + 1
        assert np.max(np.abs(g.evaluate(A.as_array()))) < 1e-9
        assert abs(g(0.5, 0.25)) > 1e-6


class TestFamilyCheck:
    def test_equal_models(self):
        f = random_exppoly2d(trial_rng(1), 3, 2)
        check = f_lambda_family_check(f, f, layered_grid(6, 2), [-1.0, 0.5, 2.0])
        assert check
        assert "constant" in check.diagnostic

    def test_agreeing_distinct_models(self):
        A = LatticeSet2D.from_rectangles([(2, 5)])
        f1, f2 = _agreeing_pair(A)
        assert not exppoly2d_allclose(f1, f2)
        check = f_lambda_family_check(f1, f2, A, [-1.0, 0.5, 2.0])
        assert check.ok, check.diagnostic

    def test_lambda_one_is_f1(self):
        A = LatticeSet2D.from_rectangles([(2, 5)])
        f1, f2 = _agreeing_pair(A)
        assert exppoly2d_allclose(linear_combine(1.0, f1, f2), f1)

    def test_models_differing_on_the_set(self):
        A = layered_grid(2, 1)
        f1 = random_exppoly2d(trial_rng(2), 2, 1)
        f2 = random_exppoly2d(trial_rng(3), 2, 1)
        check = f_lambda_family_check(f1, f2, A, [0.5])
        assert not check
        assert "differ on the set" in check.diagnostic


class TestCampaigns:
    def test_polygon_campaign(self, tmp_path):
        summary = run_polygon_uniqueness_campaign(5, seed=1, max_vertices=6, archive_dir=str(tmp_path))
        assert summary.ok
        assert summary.trials == 5
        assert summary.min_margin > 1
        assert list(tmp_path.iterdir()) == []

    def test_exppoly_campaign(self, tmp_path):
        summary = run_exppoly_uniqueness_campaign(5, seed=1, N=2, D=1, archive_dir=str(tmp_path))
        assert summary.ok
        assert summary.to_dict()["counterexamples"] == []

    def test_parallel_matches_sequential(self, tmp_path):
        a = run_exppoly_uniqueness_campaign(6, seed=9, N=2, D=2, workers=1, archive_dir=str(tmp_path))
        b = run_exppoly_uniqueness_campaign(6, seed=9, N=2, D=2, workers=3, archive_dir=str(tmp_path))
        assert a.to_dict() == b.to_dict()

    def test_counterexamples_are_archived(self, tmp_path, monkeypatch):
        monkeypatch.setattr(uniqueness, "DISTINGUISH_TOL", 1e9)
        summary = run_exppoly_uniqueness_campaign(2, seed=3, N=2, D=1, archive_dir=str(tmp_path))
        assert summary.counterexamples == [0, 1]
        assert not summary.ok
        payload = json.loads((tmp_path / "exppoly-3-0.json").read_text())
        assert payload["index"] == 0
        assert payload["report"]["verdict"] == "indistinguishable-on-set"

    def test_archive_dir_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setattr(uniqueness, "DISTINGUISH_TOL", 1e9)
        monkeypatch.setenv("PRONY2D_ARCHIVE_DIR", str(tmp_path / "found"))
        summary = run_exppoly_uniqueness_campaign(1, seed=0, N=1, D=1)
        assert summary.archived == [str(tmp_path / "found" / "exppoly-0-0.json")]

    def test_bad_mode(self):
        with pytest.raises(InvalidParameterError):
            run_polygon_uniqueness_campaign(1, seed=0, mode="other")
