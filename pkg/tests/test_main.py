"""Tests for the prony2d command line."""

import json

import numpy as np
import pytest

from prony2d.geometry.polygon import validate_polygon
from prony2d.main import run
from prony2d.store.codec import polygon_from_dict, polygon_to_dict, read_json, write_json

STAIRCASE = validate_polygon(
    [(0.1, 0.1), (0.8, 0.1), (0.8, 0.3), (0.6, 0.3), (0.6, 0.5), (0.4, 0.5), (0.4, 0.7), (0.1, 0.7)]
)
SQUARE = validate_polygon([(0.25, 0.25), (0.75, 0.25), (0.75, 0.75), (0.25, 0.75)])


@pytest.fixture
def staircase_file(tmp_path):
    return str(write_json(tmp_path / "staircase.json", polygon_to_dict(STAIRCASE)))


@pytest.fixture
def square_file(tmp_path):
    return str(write_json(tmp_path / "square.json", polygon_to_dict(SQUARE)))


class TestUsage:
    def test_help(self):
        assert run(["--help"]).exit_code == 0

    def test_unknown_flag(self):
        result = run(["sample", "--nonsense"])
        assert result.exit_code == 2
        assert result.summary == "usage error"

    def test_missing_command(self):
        assert run([]).exit_code == 2


class TestGenPolygon:
    def test_rectilinear(self, tmp_path):
        out = tmp_path / "p.json"
        result = run(["gen-polygon", "--rectilinear", "--max-vertices", "10", "--seed", "4", "--out", str(out)])
        assert result.exit_code == 0
        P = polygon_from_dict(read_json(out))
        assert len(P) % 2 == 0
        assert len(P) <= 10
        V = P.as_array()
        edges = np.roll(V, -1, axis=0) - V
        assert np.all(np.min(np.abs(edges), axis=1) == 0)

    def test_same_seed_same_file(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(["gen-polygon", "--seed", "9", "--out", str(a)])
        run(["gen-polygon", "--seed", "9", "--out", str(b)])
        assert a.read_text() == b.read_text()

    def test_star(self, tmp_path):
        out = tmp_path / "s.json"
        assert run(["gen-polygon", "--star", "--max-vertices", "7", "--out", str(out)]).exit_code == 0
        assert len(polygon_from_dict(read_json(out))) == 7


class TestSampleAndRecover:
    def test_round_trip(self, tmp_path, staircase_file):
        samples = tmp_path / "samples.json"
        recovered = tmp_path / "recovered.json"
        report = tmp_path / "report.json"
        assert run(["sample", "--polygon", staircase_file, "--set", "polygon:2,8", "--out", str(samples)]).exit_code == 0
        result = run(
            ["recover", "--samples", str(samples), "--bound", "8", "--out", str(recovered), "--report", str(report)]
        )
        assert result.exit_code == 0
        assert result.outputs == (str(recovered), str(report))
        Q = polygon_from_dict(read_json(recovered))
        assert len(Q) == 8
        found = sorted(tuple(np.round(v, 6)) for v in Q.vertices)
        expected = sorted(tuple(np.round(v, 6)) for v in STAIRCASE.vertices)
        assert np.allclose(found, expected, atol=1e-6)
        assert "verification_residual" in json.loads(report.read_text())

    def test_truncated_samples(self, tmp_path, square_file):
        samples = tmp_path / "samples.json"
        run(["sample", "--polygon", square_file, "--set", "polygon:2,4", "--out", str(samples)])
        data = read_json(samples)
        data["points"], data["values"] = data["points"][:-2], data["values"][:-2]
        write_json(samples, data)
        result = run(["recover", "--samples", str(samples), "--bound", "4", "--out", str(tmp_path / "q.json")])
        assert result.exit_code == 1
        assert result.summary.startswith("missing-sample-points")

    def test_csv_set(self, tmp_path, square_file):
        csv = tmp_path / "set.csv"
        csv.write_text("0,0\n1,0\n0,1\n")
        out = tmp_path / "samples.json"
        assert run(["sample", "--polygon", square_file, "--set", str(csv), "--out", str(out)]).exit_code == 0
        assert len(read_json(out)["points"]) == 3

    def test_bad_polygon_file(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{}")
        result = run(["sample", "--polygon", str(bad), "--set", "polygon:2,4", "--out", str(tmp_path / "s.json")])
        assert result.exit_code == 1
        assert result.summary.startswith("schema")

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        result = run(["gen-polygon", "--seed", "1", "--out", str(blocker / "p.json")])
        assert result.exit_code == 1
        assert result.summary.startswith("io-error")

    def test_unwritable_plot(self, tmp_path, square_file):
        blocker = tmp_path / "file"
        blocker.write_text("")
        result = run(["plot", "--polygon", str(square_file), "--out", str(blocker / "p.svg")])
        assert result.exit_code == 1
        assert result.summary.startswith("io-error")


class TestOtherCommands:
    def test_verify_uniqueness(self, tmp_path, staircase_file, square_file):
        out = tmp_path / "report.json"
        result = run(
            ["verify-uniqueness", "--p1", staircase_file, "--p2", square_file, "--k", "2", "--bound", "8",
             "--out", str(out)]
        )
        assert result.exit_code == 0
        assert result.summary.startswith("distinct-confirmed")
        assert read_json(out)["sampling_set"] == "polygon:2,8"

    def test_verify_over_bound(self, staircase_file, square_file):
        result = run(["verify-uniqueness", "--p1", staircase_file, "--p2", square_file, "--k", "2", "--bound", "4"])
        assert result.exit_code == 1
        assert result.summary.startswith("invalid-parameter")

    def test_oracle_check(self, staircase_file):
        result = run(["oracle-check", "--polygon", staircase_file, "--trials", "10"])
        assert result.exit_code == 0
        worst = float(result.summary.split()[2])
        assert worst < 1e-7

    def test_plot(self, tmp_path, square_file):
        out = tmp_path / "square.svg"
        result = run(["plot", "--polygon", square_file, "--set", "polygon:2,4", "--out", str(out)])
        assert result.exit_code == 0
        assert "<svg" in out.read_text()

    def test_campaign(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PRONY2D_ARCHIVE_DIR", str(tmp_path / "archive"))
        out = tmp_path / "campaign.json"
        result = run(["campaign", "--kind", "exppoly", "--trials", "3", "--N", "2", "--D", "1", "--out", str(out)])
        assert result.exit_code == 0
        summary = read_json(out)
        assert summary["trials"] == 3
        assert summary["counterexamples"] == []
