"""Exponential polynomials with polynomial coefficients.

Frequencies live on the torus R/Z and are stored in [0, 1) with the ``+``
sign convention::

    f(xi, eta) = sum_j p_j(xi, eta) * exp(2*pi*i*(x_j*xi + y_j*eta))

Coefficient polynomials are dense: ``Poly1D`` keeps powers of xi in order,
``Poly2D`` keeps a D x D grid whose entry (a, b) multiplies xi**a * eta**b.
"""

import logging
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from prony2d.errors import InvalidParameterError

logger = logging.getLogger(__name__)

MERGE_TOL = 1e-7

_TWO_PI_I = 2j * np.pi


def torus_reduce(x: float) -> float:
    """Reduce a real number into [0, 1)."""
    r = float(x) % 1.0
    # -1e-18 % 1.0 rounds to exactly 1.0
    return 0.0 if r >= 1.0 else r


def torus_distance(a: float, b: float) -> float:
    d = abs(float(a) - float(b)) % 1.0
    return min(d, 1.0 - d)


def _snap(x: float, tol: float) -> float:
    x = torus_reduce(x)
    return 0.0 if torus_distance(x, 0.0) < tol else x


@dataclass(frozen=True)
class Poly1D:
    coeffs: tuple[complex, ...] = (0j,)

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coeffs) or (0j,)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        """Index of the highest nonzero coefficient, -1 for the zero polynomial."""
        nonzero = [i for i, c in enumerate(self.coeffs) if c != 0]
        return nonzero[-1] if nonzero else -1

    def is_zero(self, tol: float = 0.0) -> bool:
        return max(abs(c) for c in self.coeffs) <= tol

    def __call__(self, xi):
        return npoly.polyval(xi, np.asarray(self.coeffs, dtype=complex))


@dataclass(frozen=True, eq=False)
class Poly2D:
    coeffs: np.ndarray

    def __post_init__(self):
        grid = np.array(self.coeffs, dtype=complex, ndmin=2)
        if grid.ndim != 2:
            raise InvalidParameterError(f"Poly2D grid must be 2-dimensional, got shape {grid.shape}")
        size = max(grid.shape)
        if grid.shape != (size, size):
            square = np.zeros((size, size), dtype=complex)
            square[: grid.shape[0], : grid.shape[1]] = grid
            grid = square
        grid.setflags(write=False)
        object.__setattr__(self, "coeffs", grid)

    @classmethod
    def constant(cls, value: complex, D: int = 1) -> "Poly2D":
        grid = np.zeros((D, D), dtype=complex)
        grid[0, 0] = value
        return cls(grid)

    @classmethod
    def zero(cls, D: int = 1) -> "Poly2D":
        return cls(np.zeros((D, D), dtype=complex))

    @property
    def size(self) -> int:
        return self.coeffs.shape[0]

    @property
    def degree_bound(self) -> int:
        """Smallest D such that every variable appears with power < D (0 for the zero polynomial)."""
        rows, cols = np.nonzero(self.coeffs)
        if rows.size == 0:
            return 0
        return int(max(rows.max(), cols.max())) + 1

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def padded(self, D: int) -> "Poly2D":
        if D == self.size:
            return self
        if self.degree_bound > D:
            raise InvalidParameterError(f"cannot fit a degree-{self.degree_bound - 1} polynomial into D={D}")
        grid = np.zeros((D, D), dtype=complex)
        n = min(D, self.size)
        grid[:n, :n] = self.coeffs[:n, :n]
        return Poly2D(grid)

    def scale(self, factor: complex) -> "Poly2D":
        return Poly2D(self.coeffs * factor)

    def __add__(self, other: "Poly2D") -> "Poly2D":
        D = max(self.size, other.size)
        return Poly2D(self.padded(D).coeffs + other.padded(D).coeffs)

    def mul_linear(self, a: float, b: float) -> "Poly2D":
        """Multiply by the linear form a*xi + b*eta."""
        n = self.size
        grid = np.zeros((n + 1, n + 1), dtype=complex)
        grid[1:, :n] += a * self.coeffs
        grid[:n, 1:] += b * self.coeffs
        return Poly2D(grid)

    def allclose(self, other: "Poly2D", tol: float) -> bool:
        D = max(self.size, other.size)
        return bool(np.max(np.abs(self.padded(D).coeffs - other.padded(D).coeffs)) < tol)

    def __call__(self, xi, eta):
        xi, eta = np.broadcast_arrays(np.asarray(xi, dtype=float), np.asarray(eta, dtype=float))
        return npoly.polyval2d(xi, eta, self.coeffs)


@dataclass(frozen=True)
class TorusFreq:
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", torus_reduce(self.x))
        object.__setattr__(self, "y", torus_reduce(self.y))

    def distance(self, other: "TorusFreq") -> float:
        """Per-coordinate torus distance (the larger of the two)."""
        return max(torus_distance(self.x, other.x), torus_distance(self.y, other.y))


@dataclass(frozen=True)
class ExpPoly1D:
    terms: tuple[tuple[float, Poly1D], ...] = ()

    def __post_init__(self):
        terms = tuple((torus_reduce(x), p) for x, p in self.terms)
        object.__setattr__(self, "terms", terms)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def frequencies(self) -> list[float]:
        return [x for x, _ in self.terms]

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        total = np.zeros(xi.shape, dtype=complex)
        for x, p in self.terms:
            total = total + p(xi) * np.exp(_TWO_PI_I * x * xi)
        return total


@dataclass(frozen=True, eq=False)
class Term2D:
    freq: TorusFreq
    poly: Poly2D


@dataclass(frozen=True, eq=False)
class ExpPoly2D:
    """A sum of terms p_j(xi, eta) exp(2 pi i (x_j xi + y_j eta)).

    Construction checks only D and the term bound N. Repeated frequencies and
    zero coefficients are allowed here, so partial sums can be built freely;
    ``canonicalize`` merges and drops them and is the form every recovery
    returns.
    """
    terms: tuple[Term2D, ...] = ()
    D: int = 1
    N: int | None = None

    def __post_init__(self):
        if self.D < 1:
            raise InvalidParameterError(f"degree bound D must be >= 1, got {self.D}")
        terms = tuple(Term2D(t.freq, t.poly.padded(self.D)) for t in self.terms)
        if self.N is not None and len(terms) > self.N:
            raise InvalidParameterError(f"{len(terms)} terms exceed the term bound N={self.N}")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def zero(cls, D: int = 1, N: int | None = None) -> "ExpPoly2D":
        return cls((), D=D, N=N)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def frequencies(self) -> list[TorusFreq]:
        return [t.freq for t in self.terms]

    def evaluate(self, points) -> np.ndarray:
        """Evaluate at an (M, 2) array of points; returns M complex values."""
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        xi, eta = pts[:, 0], pts[:, 1]
        total = np.zeros(len(pts), dtype=complex)
        for t in self.terms:
            phase = np.exp(_TWO_PI_I * (t.freq.x * xi + t.freq.y * eta))
            total += t.poly(xi, eta) * phase
        return total

    def __call__(self, xi: float, eta: float) -> complex:
        return complex(self.evaluate([(xi, eta)])[0])


def eval1d(f: ExpPoly1D, xi: float) -> complex:
    return complex(f(xi))


def eval2d(f: ExpPoly2D, t: tuple[float, float]) -> complex:
    return f(t[0], t[1])


def canonicalize(f: ExpPoly2D, tol: float = MERGE_TOL) -> ExpPoly2D:
    """Merge frequencies within ``tol``, drop negligible terms, sort by (x, y)."""
    if tol <= 0:
        raise InvalidParameterError(f"tolerance must be positive, got {tol}")
    snapped = [(_snap(t.freq.x, tol), _snap(t.freq.y, tol)) for t in f.terms]
    order = sorted(range(len(f.terms)), key=lambda i: snapped[i])

    clusters: list[list] = []
    for i in order:
        x, y = snapped[i]
        grid = f.terms[i].poly.coeffs
        for cluster in clusters:
            if torus_distance(cluster[0], x) < tol and torus_distance(cluster[1], y) < tol:
                cluster[2] = cluster[2] + grid
                break
        else:
            clusters.append([x, y, np.array(grid)])

    kept = [c for c in clusters if np.max(np.abs(c[2])) >= tol]
    kept.sort(key=lambda c: (c[0], c[1]))
    terms = tuple(Term2D(TorusFreq(x, y), Poly2D(grid)) for x, y, grid in kept)
    return ExpPoly2D(terms, D=f.D, N=f.N)


def linear_combine(lam: complex, f1: ExpPoly2D, f2: ExpPoly2D, tol: float = MERGE_TOL) -> ExpPoly2D:
    """Return the canonical form of lam*f1 + (1 - lam)*f2."""
    D = max(f1.D, f2.D)
    terms = [Term2D(t.freq, t.poly.scale(lam).padded(D)) for t in f1.terms]
    terms += [Term2D(t.freq, t.poly.scale(1 - lam).padded(D)) for t in f2.terms]
    N = None if f1.N is None or f2.N is None else f1.N + f2.N
    return canonicalize(ExpPoly2D(tuple(terms), D=D, N=N), tol)


def exppoly2d_allclose(f: ExpPoly2D, g: ExpPoly2D, tol: float = 1e-6) -> bool:
    """Structural comparison: same term count, frequencies and coefficient grids within ``tol``."""
    f, g = canonicalize(f), canonicalize(g)
    if len(f) != len(g):
        return False
    unused = list(g.terms)
    for term in f.terms:
        best = min(unused, key=lambda other: term.freq.distance(other.freq), default=None)
        if best is None or term.freq.distance(best.freq) >= tol:
            return False
        if not term.poly.allclose(best.poly, tol):
            return False
        unused.remove(best)
    return True


def exppoly1d_allclose(f: ExpPoly1D, g: ExpPoly1D, tol: float = 1e-6) -> bool:
    if len(f) != len(g):
        return False
    unused = list(g.terms)
    for x, p in f.terms:
        best = min(unused, key=lambda other: torus_distance(x, other[0]), default=None)
        if best is None or torus_distance(x, best[0]) >= tol:
            return False
        a, b = np.asarray(p.coeffs), np.asarray(best[1].coeffs)
        n = max(len(a), len(b))
        a = np.pad(a, (0, n - len(a)))
        b = np.pad(b, (0, n - len(b)))
        if np.max(np.abs(a - b)) >= tol:
            return False
        unused.remove(best)
    return True
