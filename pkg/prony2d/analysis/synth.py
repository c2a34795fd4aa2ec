"""Random models for round-trip tests and uniqueness campaigns.

Every trial draws from its own counter-based stream keyed by (seed, index), so
trials are reproducible one by one and can run in any order.
"""

import numpy as np

from prony2d.analysis.expoly import ExpPoly1D, ExpPoly2D, Poly1D, Poly2D, Term2D, TorusFreq
from prony2d.errors import InvalidParameterError

SEPARATION = 0.05


def trial_rng(seed: int, index: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(index)])))


def spread_points(rng: np.random.Generator, count: int, separation: float = SEPARATION) -> list[float]:
    """``count`` points on the torus, pairwise at least ``separation`` apart.

    The circle is cut into equal arcs at a random offset and each point lands
    inside its own arc, away from the arc ends.
    """
    if count == 0:
        return []
    arc = 1.0 / count
    if arc < separation:
        raise InvalidParameterError(f"cannot place {count} points {separation} apart on the torus")
    offset = rng.random()
    slack = arc - separation
    points = [(offset + j * arc + separation / 2 + rng.random() * slack) % 1.0 for j in range(count)]
    return sorted(points)


def _unit(rng: np.random.Generator, shape=()) -> np.ndarray:
    return np.exp(2j * np.pi * rng.random(shape))


def random_poly1d(rng: np.random.Generator, D: int) -> Poly1D:
    degree = int(rng.integers(0, D))
    return Poly1D(tuple(_unit(rng, degree + 1)))


def random_poly2d(rng: np.random.Generator, D: int) -> Poly2D:
    d = int(rng.integers(1, D + 1))
    grid = np.zeros((D, D), dtype=complex)
    grid[:d, :d] = _unit(rng, (d, d))
    return Poly2D(grid)


def random_exppoly1d(rng: np.random.Generator, N: int, D: int, *, separation: float = SEPARATION) -> ExpPoly1D:
    n = int(rng.integers(1, N + 1))
    xs = spread_points(rng, n, separation)
    return ExpPoly1D(tuple((x, random_poly1d(rng, D)) for x in xs))


def random_multiplicities(rng: np.random.Generator, N: int) -> list[int]:
    """Column heights of a random frequency set with at most N points."""
    n = int(rng.integers(1, N + 1))
    columns = int(rng.integers(1, n + 1))
    heights = [1] * columns
    for _ in range(n - columns):
        heights[int(rng.integers(0, columns))] += 1
    return heights


def random_exppoly2d(
    rng: np.random.Generator,
    N: int,
    D: int,
    *,
    separation: float = SEPARATION,
    distinct_x: bool = False,
) -> ExpPoly2D:
    """Random f with at most N terms; frequencies above a shared x stay ``separation`` apart in y."""
    heights = [1] * int(rng.integers(1, N + 1)) if distinct_x else random_multiplicities(rng, N)
    xs = spread_points(rng, len(heights), separation)
    terms = []
    for x, height in zip(xs, heights):
        for y in spread_points(rng, height, separation):
            terms.append(Term2D(TorusFreq(x, y), random_poly2d(rng, D)))
    return ExpPoly2D(tuple(terms), D=D, N=N)
