"""Fourier transform of polygon indicators.

Convention: the transform of P at t is the integral over P of exp(-2 pi i x.t).
``bb_transform`` is the vertex sum with edge-direction denominators;
``ft_polygon`` integrates triangle by triangle and is defined everywhere.
"""

import logging

import numpy as np

from prony2d.analysis.expoly import ExpPoly2D, Poly2D, Term2D, TorusFreq
from prony2d.analysis.sampling import FourierSampleSet
from prony2d.errors import InvalidParameterError, SingularDirectionError
from prony2d.geometry.polygon import Polygon, SlopeSet, edge_frame, triangulate

logger = logging.getLogger(__name__)

SINGULAR_TOL = 1e-12
SERIES_TOL = 1e-6
SERIES_TERMS = 6

_FOUR_PI_SQ = 4.0 * np.pi**2


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def bb_transform(P: Polygon, t, *, singular_tol: float = SINGULAR_TOL) -> complex:
    """Vertex-sum transform; weights are the signed det(u_{j-1}, u_j) of a counterclockwise P."""
    t = np.asarray(t, dtype=float)
    U = np.array(edge_frame(P).directions)
    dots = U @ t
    if np.any(np.abs(dots) < singular_tol):
        j = int(np.argmin(np.abs(dots)))
        raise SingularDirectionError(f"edge {j} is orthogonal to t={tuple(t)}")
    prev, prev_dots = np.roll(U, 1, axis=0), np.roll(dots, 1)
    phase = np.exp(-2j * np.pi * (P.as_array() @ t))
    return complex(np.sum(_cross(prev, U) / (prev_dots * dots) * phase) / _FOUR_PI_SQ)


def _phi1(z: np.ndarray) -> np.ndarray:
    """(e^z - 1) / z, the integral of e^{sz} over s in [0, 1]."""
    out = np.empty_like(z)
    small = np.abs(z) < SERIES_TOL
    zs = z[small]
    out[small] = 1 + zs / 2 + zs**2 / 6 + zs**3 / 24
    zl = z[~small]
    out[~small] = np.expm1(zl) / zl
    return out


def _moments(a: np.ndarray, count: int) -> np.ndarray:
    """J_m(a) = integral of s^m e^{sa} over [0, 1] for m = 0..count."""
    J = np.empty((count + 1,) + a.shape, dtype=complex)
    small = np.abs(a) <= 1.0

    a_small = a[small]
    term = np.ones_like(a_small)
    acc = np.zeros((count + 1,) + a_small.shape, dtype=complex)
    for k in range(30):
        for m in range(count + 1):
            acc[m] += term / (m + k + 1)
        term = term * a_small / (k + 1)
    J[:, small] = acc

    a_large = a[~small]
    e_large = np.exp(a_large)
    J[0, ~small] = np.expm1(a_large) / a_large
    for m in range(1, count + 1):
        J[m, ~small] = (e_large - m * J[m - 1, ~small]) / a_large
    return J


def _simplex_integral(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Integral of e^{s a + u b} over the unit simplex s, u >= 0, s + u <= 1."""
    h = b - a
    out = np.empty_like(a)
    near = np.abs(h) < SERIES_TOL
    far = ~near
    out[far] = (_phi1(b[far]) - _phi1(a[far])) / h[far]
    if near.any():
        J = _moments(a[near], SERIES_TERMS)
        hn = h[near]
        total = np.zeros_like(hn)
        factorial = 1.0
        for m in range(1, SERIES_TERMS + 1):
            factorial *= m
            total += J[m] * hn ** (m - 1) / factorial
        out[near] = total
    return out


def ft_polygon(P: Polygon, points) -> np.ndarray:
    """Transform of the indicator of P at every row of ``points``."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    tri = triangulate(P)
    w = [-2j * np.pi * (pts @ tri[:, k].T) for k in range(3)]
    double_area = np.abs(_cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0]))
    values = double_area * np.exp(w[0]) * _simplex_integral(w[1] - w[0], w[2] - w[0])
    return values.sum(axis=1)


def ft_triangle_oracle(P: Polygon, t) -> complex:
    return complex(ft_polygon(P, [t])[0])


def clear_denominators(samples: FourierSampleSet, slopes: SlopeSet) -> FourierSampleSet:
    """Multiply every sample by the product of s_r . t; exact zero on the lines s_r . t = 0."""
    forms = slopes.linear_forms(samples.points)
    product = np.prod(forms, axis=1)
    product[np.any(np.abs(forms) < SINGULAR_TOL, axis=1)] = 0.0
    return FourierSampleSet(samples.points, samples.values * product)


def vertex_coefficient(P: Polygon, j: int, slopes: SlopeSet | None = None) -> Poly2D:
    """Coefficient of exp(-2 pi i v_j . t) in the cleared transform, degree < k - 1."""
    frame = edge_frame(P, slopes)
    if frame.k < 2:
        raise InvalidParameterError("at least two slopes are needed")
    n = len(P)
    before, after = (j - 1) % n, j % n
    a, b = frame.slope_index[before], frame.slope_index[after]
    det = _cross(np.array(frame.directions[before]), np.array(frame.directions[after]))
    scalar = det * frame.signs[before] * frame.signs[after] / _FOUR_PI_SQ

    poly = Poly2D.constant(scalar)
    for r, (sx, sy) in enumerate(frame.slopes):
        if r not in (a, b):
            poly = poly.mul_linear(sx, sy)
    return poly.padded(frame.k - 1)


def assemble_fp(P: Polygon, slopes: SlopeSet | None = None) -> ExpPoly2D:
    """The cleared transform of P as an exponential polynomial at frequencies -v_j mod 1.

    Frequencies are reduced mod 1, so the result equals prod_r (s_r . t) times
    the transform of P only at integer points t in Z^2.
    """
    frame = edge_frame(P, slopes)
    terms = tuple(
        Term2D(TorusFreq(-x, -y), vertex_coefficient(P, j, frame.slopes)) for j, (x, y) in enumerate(P.vertices)
    )
    return ExpPoly2D(terms, D=frame.k - 1, N=len(P))
