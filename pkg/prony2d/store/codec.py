"""JSON and CSV forms of polygons, sample sets, models and lattices.

Floats are written with their shortest round-trip repr, so identical inputs
give byte-identical files.
"""

import json
import logging
from collections.abc import Mapping
from pathlib import Path

import numpy as np

from prony2d.analysis.expoly import ExpPoly2D, Poly2D, Term2D, TorusFreq
from prony2d.analysis.sampling import FourierSampleSet, LatticeSet2D, layered_grid, polygon_grid
from prony2d.errors import SchemaError
from prony2d.geometry.polygon import Polygon, SlopeSet, validate_polygon

logger = logging.getLogger(__name__)


def dump_json(payload) -> str:
    return json.dumps(payload, indent=2) + "\n"


def write_json(path: str | Path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_json(payload))
    logger.debug("Wrote %s", path)
    return path


def read_json(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise SchemaError(f"cannot read {path}: {err.strerror}") from err
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as err:
        raise SchemaError(f"{path} is not valid JSON: {err.msg} at line {err.lineno}") from err
    if not isinstance(payload, dict):
        raise SchemaError(f"{path} must hold a JSON object")
    return payload


def _field(payload: Mapping, key: str, kind: str):
    if not isinstance(payload, Mapping) or key not in payload:
        raise SchemaError(f"{kind} JSON needs a {key!r} field")
    return payload[key]


def _pairs(raw, kind: str, key: str) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as err:
        raise SchemaError(f"{kind} {key!r} must be a list of number pairs") from err
    if arr.size == 0:
        return arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise SchemaError(f"{kind} {key!r} must be a list of number pairs")
    return arr


def _complex_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


# Polygon


def polygon_to_dict(P: Polygon) -> dict:
    return {"vertices": [[x, y] for x, y in P.vertices]}


def polygon_from_dict(payload: Mapping) -> Polygon:
    """Parse and validate; invalid geometry raises PolygonValidationError."""
    return validate_polygon(_pairs(_field(payload, "vertices", "polygon"), "polygon", "vertices"))


# Samples


def samples_to_dict(samples: FourierSampleSet) -> dict:
    return {
        "points": [[m, n] for m, n in samples.points],
        "values": [_complex_pair(v) for v in samples.values],
    }


def samples_from_dict(payload: Mapping) -> FourierSampleSet:
    points = _pairs(_field(payload, "points", "samples"), "samples", "points")
    values = _pairs(_field(payload, "values", "samples"), "samples", "values")
    if len(points) != len(values):
        raise SchemaError(f"samples have {len(points)} points but {len(values)} values")
    if np.any(points != np.round(points)):
        raise SchemaError("sample points must be integers")
    return FourierSampleSet(
        [(int(m), int(n)) for m, n in points],
        values[:, 0] + 1j * values[:, 1],
    )


# Exponential polynomials


def exppoly2d_to_dict(f: ExpPoly2D) -> dict:
    return {
        "D": f.D,
        "N": f.N,
        "terms": [
            {
                "x": t.freq.x,
                "y": t.freq.y,
                "coeffs": [[_complex_pair(c) for c in row] for row in np.asarray(t.poly.coeffs)],
            }
            for t in f.terms
        ],
    }


def exppoly2d_from_dict(payload: Mapping) -> ExpPoly2D:
    D = _field(payload, "D", "model")
    if not isinstance(D, int) or isinstance(D, bool):
        raise SchemaError("model 'D' must be an integer")
    terms = []
    for i, raw in enumerate(_field(payload, "terms", "model")):
        try:
            x, y = float(_field(raw, "x", "term")), float(_field(raw, "y", "term"))
            grid = np.asarray(_field(raw, "coeffs", "term"), dtype=float)
        except (TypeError, ValueError) as err:
            raise SchemaError(f"term {i} has non-numeric entries") from err
        if grid.ndim != 3 or grid.shape[2] != 2:
            raise SchemaError(f"term {i} 'coeffs' must be a grid of [re, im] pairs")
        terms.append(Term2D(TorusFreq(x, y), Poly2D(grid[..., 0] + 1j * grid[..., 1])))
    return ExpPoly2D(tuple(terms), D=D, N=payload.get("N"))


# Slopes


def slopes_to_dict(slopes: SlopeSet) -> dict:
    return {"slopes": [[a, b] for a, b in slopes]}


def slopes_from_dict(payload: Mapping) -> SlopeSet:
    return SlopeSet(tuple(map(tuple, _pairs(_field(payload, "slopes", "slopes"), "slopes", "slopes"))))


# Lattices


def lattice_to_csv(A: LatticeSet2D) -> str:
    return "".join(f"{m},{n}\n" for m, n in A.points)


def lattice_from_csv(text: str) -> LatticeSet2D:
    points = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            m, n = (int(part) for part in line.split(","))
        except ValueError as err:
            raise SchemaError(f"line {lineno}: expected 'm,n', got {line!r}") from err
        points.append((m, n))
    return LatticeSet2D(tuple(points))


def parse_lattice(name: str) -> LatticeSet2D:
    """Build a set from ``polygon:k,N`` or ``layered:N,D``."""
    kind, _, params = name.partition(":")
    try:
        a, b = (int(p) for p in params.split(","))
    except ValueError as err:
        raise SchemaError(f"set must look like 'polygon:k,N' or 'layered:N,D', got {name!r}") from err
    if kind == "polygon":
        return polygon_grid(a, b)
    if kind == "layered":
        return layered_grid(a, b)
    raise SchemaError(f"unknown set kind {kind!r}; expected 'polygon' or 'layered'")
