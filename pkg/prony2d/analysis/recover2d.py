"""Bivariate recovery on the layered lattice sets.

Stage t of the layered procedure looks at rows eta in [0, 2tD] with width
2*(N//t)*D. Every frequency column x whose multiplicity is exactly t is fitted
there, its terms are subtracted from the residual, and the next stage
continues with the columns that remain.
"""

import itertools
import logging
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize

from prony2d.analysis.expoly import (
    ExpPoly2D,
    Poly1D,
    Poly2D,
    Term2D,
    TorusFreq,
    canonicalize,
    exppoly2d_allclose,
    torus_distance,
    torus_reduce,
)
from prony2d.analysis.prony1d import recover_exppoly1d
from prony2d.analysis.sampling import FourierSampleSet, stage_rectangle
from prony2d.errors import (
    AmbiguousDataError,
    CandidateBudgetExceededError,
    DegreeBoundViolatedError,
    InconsistentRowsError,
    InvalidParameterError,
    MissingSamplePointsError,
    ModelBoundViolationError,
    ModelOrderExceededError,
    MultiplicityMismatchError,
    RecoveryError,
    RecoveryInconclusiveError,
)

logger = logging.getLogger(__name__)

MATCH_TOL = 1e-6
GRID_TOL = 1e-9
STAGE_TOL = 1e-6
FIT_TOL = 1e-8
REFINE_FLOOR = 1e-11
REFINE_RANGE = 1e-3
CANDIDATE_BUDGET = 100_000


@dataclass(frozen=True)
class MultiplicityMap:
    """How many frequencies sit above each x-projection."""

    entries: tuple[tuple[float, int], ...]

    def __post_init__(self):
        entries = sorted((torus_reduce(x), int(t)) for x, t in self.entries)
        for x, t in entries:
            if t < 1:
                raise InvalidParameterError(f"multiplicity of x={x:.6g} must be >= 1, got {t}")
        for (a, _), (b, _) in zip(entries, entries[1:]):
            if torus_distance(a, b) < MATCH_TOL:
                raise InvalidParameterError(f"x-projections {a:.6g} and {b:.6g} coincide")
        object.__setattr__(self, "entries", tuple(entries))

    @classmethod
    def from_dict(cls, mapping: Mapping[float, int]) -> "MultiplicityMap":
        return cls(tuple(mapping.items()))

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def xs(self) -> tuple[float, ...]:
        return tuple(x for x, _ in self.entries)

    @property
    def total(self) -> int:
        return sum(t for _, t in self.entries)

    def partition(self) -> dict[int, tuple[float, ...]]:
        """Stage number t -> the x-projections carrying exactly t frequencies."""
        parts: dict[int, list[float]] = {}
        for x, t in self.entries:
            parts.setdefault(t, []).append(x)
        return {t: tuple(xs) for t, xs in sorted(parts.items())}

    def check_bound(self, N: int) -> None:
        if self.total > N:
            raise InvalidParameterError(f"multiplicities sum to {self.total}, bound is N={N}")
        for t in range(1, max((t for _, t in self.entries), default=0) + 1):
            upper = sum(1 for _, s in self.entries if s >= t)
            if upper * t > N:
                raise InvalidParameterError(f"{upper} projections carry >= {t} frequencies, more than N/t allows")


def multiplicity_map_of(f: ExpPoly2D) -> MultiplicityMap:
    counts: list[list] = []
    for term in f.terms:
        for entry in counts:
            if torus_distance(entry[0], term.freq.x) < MATCH_TOL:
                entry[1] += 1
                break
        else:
            counts.append([term.freq.x, 1])
    return MultiplicityMap(tuple((x, t) for x, t in counts))


@dataclass(frozen=True)
class RecoveryReport:
    result: ExpPoly2D
    residual: float
    candidates_tried: int

    def to_dict(self) -> dict:
        from prony2d.store.codec import exppoly2d_to_dict

        return {
            "result": exppoly2d_to_dict(self.result),
            "residual": self.residual,
            "candidates_tried": self.candidates_tried,
        }


class _SampleField:
    """Sample values aligned with their points, with cached rectangle lookups."""

    def __init__(self, samples: Mapping):
        fs = samples if isinstance(samples, FourierSampleSet) else FourierSampleSet.from_mapping(samples)
        self.points = np.array(fs.points, dtype=float).reshape(-1, 2)
        self.values = np.array(fs.values, dtype=complex)
        self.scale = fs.max_abs()
        self._index = {p: i for i, p in enumerate(fs.points)}
        self._rects: dict[tuple[int, int], np.ndarray] = {}

    def missing(self, width: int, height: int) -> list[tuple[int, int]]:
        return [
            (m, n) for m in range(width + 1) for n in range(height + 1) if (m, n) not in self._index
        ]

    def require(self, width: int, height: int) -> None:
        missing = self.missing(width, height)
        if missing:
            raise MissingSamplePointsError(missing)

    def rows(self, values: np.ndarray, width: int, height: int) -> np.ndarray:
        """values on [width]_0 x [height]_0 as an array indexed [eta, xi]."""
        key = (width, height)
        if key not in self._rects:
            self.require(width, height)
            self._rects[key] = np.array(
                [[self._index[(m, n)] for m in range(width + 1)] for n in range(height + 1)], dtype=int
            )
        return values[self._rects[key]]

    def subtract(self, values: np.ndarray, terms, D: int) -> np.ndarray:
        if not terms:
            return values
        return values - ExpPoly2D(tuple(terms), D=D).evaluate(self.points)

    def available_stages(self, N: int, D: int) -> int:
        """Largest r such that every stage rectangle t <= r is sampled."""
        r = 0
        while r < N and not self.missing(*stage_rectangle(N, D, r + 1)):
            r += 1
        return r


def _match(keys, x: float) -> float | None:
    for key in keys:
        if torus_distance(key, x) < MATCH_TOL:
            return key
    return None


def _row_columns(grid: np.ndarray, bound: int, D: int, scale: float) -> list[tuple[float, dict[int, Poly1D]]]:
    """Recover every row in xi and group the row polynomials by frequency."""
    columns: list[tuple[float, dict[int, Poly1D]]] = []
    for eta, row in enumerate(grid):
        for x, p in recover_exppoly1d(row, bound, D, scale=scale, tol=STAGE_TOL).terms:
            key = _match([c[0] for c in columns], x)
            if key is None:
                columns.append((x, {eta: p}))
                continue
            polys = next(c[1] for c in columns if c[0] == key)
            if eta in polys:
                raise InconsistentRowsError(f"row {eta} reveals x={x:.6g} twice")
            polys[eta] = p
    return columns


def _fit_column(polys: dict[int, Poly1D], t: int, D: int, scale: float) -> list[tuple[float, Poly2D]]:
    """Split a frequency column into the y-frequencies stacked above it."""
    height = 2 * t * D
    per_xi = []
    for xi in range(D + 1):
        seq = np.array([polys[eta](xi) if eta in polys else 0j for eta in range(height + 1)])
        per_xi.append(recover_exppoly1d(seq, t, D, scale=scale, tol=STAGE_TOL))

    ys: list[float] = []
    for g in per_xi:
        for y in g.frequencies:
            if _match(ys, y) is None:
                ys.append(y)
    if len(ys) > t:
        raise ModelBoundViolationError(f"{len(ys)} frequencies above one projection, expected at most {t}")

    fitted = []
    for y in sorted(ys):
        grid = np.zeros((D + 1, D + 1), dtype=complex)
        for xi, g in enumerate(per_xi):
            for y_other, r in g.terms:
                if torus_distance(y_other, y) < MATCH_TOL:
                    grid[xi] = r(np.arange(D + 1))
        fitted.append((y, recover_poly_grid(grid, D, tol=STAGE_TOL, scale=scale)))
    return fitted


def _stage_columns(sf: _SampleField, values: np.ndarray, N: int, D: int, t: int):
    width, height = stage_rectangle(N, D, t)
    return _row_columns(sf.rows(values, width, height), N // t, D, sf.scale)


def recover_poly_grid(values, D: int, *, tol: float = GRID_TOL, scale: float | None = None) -> Poly2D:
    """Polynomial of degree < D in each variable from its values on [D]_0 x [D]_0.

    ``values`` is either a (D+1) x (D+1) array indexed [xi, eta] or a mapping
    from lattice points. The {0..D-1}^2 subgrid determines the polynomial; the
    last row and column are a consistency check.
    """
    if D < 1:
        raise InvalidParameterError(f"D must be >= 1, got {D}")
    if isinstance(values, Mapping):
        missing = [(m, n) for m in range(D + 1) for n in range(D + 1) if (m, n) not in values]
        if missing:
            raise MissingSamplePointsError(missing)
        F = np.array([[values[(m, n)] for n in range(D + 1)] for m in range(D + 1)], dtype=complex)
    else:
        F = np.asarray(values, dtype=complex)
    if F.shape != (D + 1, D + 1):
        raise InvalidParameterError(f"expected a {D + 1}x{D + 1} grid of values, got shape {F.shape}")

    V = np.vander(np.arange(D, dtype=float), D, increasing=True)
    C = scipy.linalg.solve(V, scipy.linalg.solve(V, F[:D, :D]).T).T
    poly = Poly2D(C)

    nodes = np.arange(D + 1, dtype=float)
    xi, eta = np.meshgrid(nodes, nodes, indexing="ij")
    deviation = float(np.max(np.abs(poly(xi, eta) - F)))
    ref = max(float(np.max(np.abs(F))), scale or 0.0)
    if deviation > tol * ref:
        raise DegreeBoundViolatedError(f"grid values deviate by {deviation:.3e} from any degree < {D} polynomial")
    return poly


def refine_exppoly2d(points, values, f: ExpPoly2D) -> tuple[ExpPoly2D, float]:
    """Polish the frequencies of ``f`` against samples by nonlinear least squares.

    Coefficients are re-fitted by a linear solve at every step; the returned
    residual is the largest sample misfit of the polished model.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    s = np.asarray(values, dtype=complex).ravel()
    if not f.terms:
        return f, float(np.max(np.abs(s), initial=0.0))
    D = f.D
    unit = np.maximum(np.max(np.abs(pts), axis=0), 1.0)
    powers = [(a, b) for a in range(D) for b in range(D)]
    monomials = np.column_stack([(pts[:, 0] / unit[0]) ** a * (pts[:, 1] / unit[1]) ** b for a, b in powers])

    def design(freqs: np.ndarray) -> np.ndarray:
        waves = np.exp(2j * np.pi * (np.outer(pts[:, 0], freqs[:, 0]) + np.outer(pts[:, 1], freqs[:, 1])))
        return np.hstack([monomials * waves[:, [j]] for j in range(len(freqs))])

    def misfit(flat: np.ndarray) -> np.ndarray:
        V = design(flat.reshape(-1, 2))
        coef, *_ = scipy.linalg.lstsq(V, s)
        r = V @ coef - s
        return np.concatenate([r.real, r.imag])

    start = np.array([(t.freq.x, t.freq.y) for t in f.terms], dtype=float).ravel()
    fit = scipy.optimize.least_squares(misfit, start, jac="3-point", xtol=1e-14, ftol=1e-14, gtol=1e-14)
    freqs = fit.x.reshape(-1, 2)
    V = design(freqs)
    coef, *_ = scipy.linalg.lstsq(V, s)
    residual = float(np.max(np.abs(V @ coef - s)))

    rescale = np.array([unit[0] ** -a * unit[1] ** -b for a, b in powers])
    size = D * D
    terms = tuple(
        Term2D(TorusFreq(x, y), Poly2D((coef[j * size : (j + 1) * size] * rescale).reshape(D, D)))
        for j, (x, y) in enumerate(freqs)
    )
    logger.debug("Refined %d frequencies, residual %.3e", len(terms), residual)
    return canonicalize(ExpPoly2D(terms, D=D, N=f.N)), residual


def _settle(sf: _SampleField, f: ExpPoly2D, residual: float, tol: float) -> tuple[ExpPoly2D, float]:
    """Polish a model whose residual sits between the rounding floor and ``REFINE_RANGE``."""
    if min(tol, REFINE_FLOOR) * sf.scale < residual <= REFINE_RANGE * sf.scale:
        polished, refined = refine_exppoly2d(sf.points, sf.values, f)
        if refined < residual:
            return polished, refined
    return f, residual


def recover_unifreq(samples: Mapping, N: int, D: int) -> ExpPoly2D:
    """Recover f whose frequencies all have y = 0 from [2ND]_0 x [D]_0."""
    if N < 1 or D < 1:
        raise InvalidParameterError(f"N and D must be >= 1, got N={N}, D={D}")
    sf = _SampleField(samples)
    grid = sf.rows(sf.values, 2 * N * D, D)
    columns = _row_columns(grid, N, D, sf.scale)
    if len(columns) > N:
        raise InconsistentRowsError(f"rows reveal {len(columns)} frequencies, bound is N={N}")

    terms = []
    for x, polys in columns:
        F = np.zeros((D + 1, D + 1), dtype=complex)
        for eta, p in polys.items():
            F[:, eta] = p(np.arange(D + 1))
        try:
            poly = recover_poly_grid(F, D, tol=STAGE_TOL, scale=sf.scale)
        except DegreeBoundViolatedError as err:
            raise InconsistentRowsError(f"row polynomials at x={x:.6g} disagree: {err}") from err
        terms.append(Term2D(TorusFreq(x, 0.0), poly))
    logger.debug("Unifreq recovery found %d terms", len(terms))
    return canonicalize(ExpPoly2D(tuple(terms), D=D, N=N))


def recover_layered(samples: Mapping, N: int, D: int, mm: MultiplicityMap, *, tol: float = FIT_TOL) -> RecoveryReport:
    if N < 1 or D < 1:
        raise InvalidParameterError(f"N and D must be >= 1, got N={N}, D={D}")
    mm.check_bound(N)
    sf = _SampleField(samples)
    parts = mm.partition()
    for t in parts:
        sf.require(*stage_rectangle(N, D, t))

    values = sf.values
    remaining = list(mm.xs)
    terms: list[Term2D] = []
    for t, declared in parts.items():
        try:
            columns = _stage_columns(sf, values, N, D, t)
        except (ModelBoundViolationError, ModelOrderExceededError) as err:
            raise MultiplicityMismatchError(f"stage {t}: {err}") from err
        for x, _ in columns:
            if _match(remaining, x) is None:
                raise MultiplicityMismatchError(f"stage {t} reveals x={x:.6g}, which is not in the multiplicity map")

        stage_terms = []
        for x in declared:
            column = next((c for c in columns if torus_distance(c[0], x) < MATCH_TOL), None)
            if column is None:
                raise MultiplicityMismatchError(f"x={x:.6g} is not revealed at stage {t}")
            try:
                fitted = _fit_column(column[1], t, D, sf.scale)
            except RecoveryError as err:
                raise MultiplicityMismatchError(f"x={x:.6g} does not carry {t} frequencies: {err}") from err
            if len(fitted) != t:
                raise MultiplicityMismatchError(f"x={x:.6g} carries {len(fitted)} frequencies, declared {t}")
            stage_terms.extend(Term2D(TorusFreq(column[0], y), p) for y, p in fitted)

        values = sf.subtract(values, stage_terms, D)
        terms.extend(stage_terms)
        remaining = [x for x in remaining if _match(declared, x) is None]
        logger.info("Stage %d recovered %d terms", t, len(stage_terms))

    residual = float(np.max(np.abs(values), initial=0.0))
    result, residual = _settle(sf, canonicalize(ExpPoly2D(tuple(terms), D=D, N=N)), residual, tol)
    if residual > tol * sf.scale:
        raise MultiplicityMismatchError(f"layered model leaves residual {residual:.3e}")
    return RecoveryReport(result, residual, 1)


@dataclass
class _CandidateSearch:
    sf: _SampleField
    N: int
    D: int
    budget: int
    tol: float
    explored: int = 0
    max_stage: int = 0
    found: list = field(default_factory=list)

    def run(self, X: tuple[float, ...]) -> None:
        self.max_stage = self.sf.available_stages(self.N, self.D)
        self._visit(1, self.sf.values, X, (), 0)

    def _visit(self, t, values, remaining, terms, assigned) -> None:
        if not remaining:
            self._accept(values, terms)
            return
        if t > self.max_stage:
            return
        try:
            columns = _stage_columns(self.sf, values, self.N, self.D, t)
        except RecoveryError as err:
            logger.debug("Stage %d rows failed: %s", t, err)
            return

        eligible: dict[float, list[Term2D]] = {}
        for x, polys in columns:
            key = _match(remaining, x)
            if key is None:
                return
            try:
                fitted = _fit_column(polys, t, self.D, self.sf.scale)
            except RecoveryError:
                continue
            if len(fitted) == t:
                eligible[key] = [Term2D(TorusFreq(x, y), p) for y, p in fitted]
            elif fitted:
                # fewer than t frequencies above a column that outlived stage t - 1
                return

        keys = sorted(eligible)
        for size in range(len(keys), -1, -1):
            for chosen in itertools.combinations(keys, size):
                left = len(remaining) - size
                if assigned + size * t + left * (t + 1) > self.N:
                    continue
                if left and t + 1 > self.max_stage:
                    continue
                self.explored += 1
                if self.explored > self.budget:
                    raise CandidateBudgetExceededError(f"candidate search exceeded {self.budget} branches")
                stage_terms = [term for key in chosen for term in eligible[key]]
                self._visit(
                    t + 1,
                    self.sf.subtract(values, stage_terms, self.D),
                    tuple(x for x in remaining if x not in chosen),
                    terms + tuple(stage_terms),
                    assigned + size * t,
                )

    def _accept(self, values, terms) -> None:
        residual = float(np.max(np.abs(values), initial=0.0))
        result = canonicalize(ExpPoly2D(tuple(terms), D=self.D, N=self.N))
        result, residual = _settle(self.sf, result, residual, self.tol)
        if residual > self.tol * self.sf.scale:
            logger.debug("Leaf rejected with residual %.3e", residual)
            return
        if any(exppoly2d_allclose(result, other.result) for other in self.found):
            return
        self.found.append(RecoveryReport(result, residual, 0))


def recover_candidates(
    samples: Mapping,
    N: int,
    D: int,
    X,
    *,
    budget: int = CANDIDATE_BUDGET,
    tol: float = FIT_TOL,
) -> list[RecoveryReport]:
    """Every model over the projections X that reproduces all samples.

    Multiplicity maps are explored stage by stage; a branch ends as soon as a
    stage contradicts it, so only maps consistent with every stage reach the
    final residual check.
    """
    if N < 1 or D < 1:
        raise InvalidParameterError(f"N and D must be >= 1, got N={N}, D={D}")
    xs = tuple(sorted(torus_reduce(x) for x in X))
    if len(xs) > N:
        raise InvalidParameterError(f"{len(xs)} projections exceed the term bound N={N}")

    sf = _SampleField(samples)
    if xs:
        sf.require(*stage_rectangle(N, D, 1))
    search = _CandidateSearch(sf, N, D, budget, tol)
    search.run(xs)

    reports = sorted(
        search.found,
        key=lambda r: [(term.freq.x, term.freq.y) for term in r.result.terms],
    )
    logger.info("Candidate search explored %d branches, %d candidates", search.explored, len(reports))
    return [RecoveryReport(r.result, r.residual, search.explored) for r in reports]


def estimate_projections(samples: Mapping, N: int, D: int) -> tuple[float, ...]:
    """x-projections visible on the widest rows eta in [0, 2D]."""
    sf = _SampleField(samples)
    try:
        columns = _stage_columns(sf, sf.values, N, D, 1)
    except RecoveryError as err:
        raise RecoveryInconclusiveError(f"widest rows do not fit {N} frequencies: {err}") from err
    return tuple(sorted(x for x, _ in columns))


def recover_auto(samples: Mapping, N: int, D: int, *, budget: int = CANDIDATE_BUDGET) -> RecoveryReport:
    if N < 1 or D < 1:
        raise InvalidParameterError(f"N and D must be >= 1, got N={N}, D={D}")
    sf = _SampleField(samples)
    sf.require(*stage_rectangle(N, D, 1))
    if sf.scale == 0.0:
        return RecoveryReport(ExpPoly2D.zero(D, N), 0.0, 1)

    X = estimate_projections(samples, N, D)
    if len(X) > N:
        raise RecoveryInconclusiveError(f"{len(X)} projections visible, bound is N={N}")
    logger.info("Estimated %d x-projections", len(X))

    candidates = recover_candidates(samples, N, D, X, budget=budget)
    if not candidates:
        raise RecoveryInconclusiveError("no model within the bounds reproduces the samples")
    if len(candidates) > 1:
        raise AmbiguousDataError(f"{len(candidates)} models reproduce the samples", candidates=candidates)
    return candidates[0]
