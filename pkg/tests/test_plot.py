"""Tests for SVG plots."""

from prony2d.analysis.sampling import polygon_grid
from prony2d.geometry.polygon import validate_polygon
from prony2d.store.plot import render_svg

L_SHAPE = validate_polygon([(0.1, 0.1), (0.7, 0.1), (0.7, 0.4), (0.4, 0.4), (0.4, 0.8), (0.1, 0.8)])


def test_polygon_only(tmp_path):
    path = render_svg(tmp_path / "p.svg", L_SHAPE)
    text = path.read_text()
    assert "<svg" in text
    assert "6 vertices" in text


def test_with_lattice_panel(tmp_path):
    path = render_svg(tmp_path / "plots" / "p.svg", L_SHAPE, polygon_grid(2, 3), label="polygon:2,3")
    text = path.read_text()
    assert "polygon:2,3" in text
    assert "<svg" in text


def test_output_is_reproducible(tmp_path):
    a = render_svg(tmp_path / "a.svg", L_SHAPE).read_text()
    b = render_svg(tmp_path / "b.svg", L_SHAPE).read_text()
    assert a == b
