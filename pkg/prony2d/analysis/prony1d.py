"""Univariate recovery: minimal recurrence, unit-circle roots, confluent solve."""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.optimize

from prony2d.analysis.expoly import ExpPoly1D, Poly1D, torus_reduce
from prony2d.errors import (
    ConditioningError,
    InvalidParameterError,
    ModelBoundViolationError,
    ModelOrderExceededError,
    OffCircleRootError,
    RecoveryError,
)

logger = logging.getLogger(__name__)

RANK_TOL = 1e-9
RESIDUAL_TOL = 1e-8
CLUSTER_TOL = 1e-6
RADIAL_TOL = 0.05
COND_LIMIT = 1e12
ZERO_TOL = 1e-9
FIT_TOL = 1e-8


@dataclass(frozen=True)
class Annihilator:
    """Monic polynomial c_0 + c_1 z + ... + z^d, coefficients in increasing order."""

    coeffs: tuple[complex, ...]

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coeffs)
        if not coeffs or coeffs[-1] != 1:
            raise InvalidParameterError("annihilator must be monic")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def roots(self) -> np.ndarray:
        if self.degree == 0:
            return np.zeros(0, dtype=complex)
        return np.roots(np.asarray(self.coeffs[::-1]))


@dataclass(frozen=True)
class FreqMult:
    entries: tuple[tuple[float, int], ...] = ()

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def order(self) -> int:
        return sum(m for _, m in self.entries)


@dataclass(frozen=True)
class ConfluentResult:
    poly: ExpPoly1D
    residual: float
    condition: float


def _hankel(s: np.ndarray, order: int) -> np.ndarray:
    """Sliding windows of length order+1: H[i, j] = s[i + j]."""
    L = len(s) - 1
    return scipy.linalg.hankel(s[: L - order + 1], s[L - order :])


def annihilator(
    samples,
    max_order: int,
    rank_tol: float = RANK_TOL,
    *,
    residual_tol: float = RESIDUAL_TOL,
    zero_tol: float = ZERO_TOL,
    scale: float | None = None,
) -> Annihilator:
    """Minimal monic recurrence satisfied by every window of ``samples``.

    ``scale`` is the magnitude both tolerances are relative to; it defaults
    to the largest sample. Pass the scale of the surrounding data when the
    sequence is a slice of it, so a slice at the noise floor reads as zero.
    """
    s = np.asarray(samples, dtype=complex).ravel()
    L = len(s) - 1
    if max_order < 1:
        raise InvalidParameterError(f"max_order must be >= 1, got {max_order}")
    if L < 2 * max_order:
        raise InvalidParameterError(f"need at least {2 * max_order + 1} samples for order {max_order}, got {L + 1}")

    peak = float(np.max(np.abs(s)))
    ref = max(peak, float(scale or 0.0))
    if peak == 0.0 or peak <= zero_tol * ref:
        return Annihilator((1,))

    sv = scipy.linalg.svd(_hankel(s, max_order), compute_uv=False)
    rank = int(np.sum(sv > max(rank_tol * sv[0], residual_tol * ref)))
    logger.debug("Hankel rank %d (max order %d)", rank, max_order)

    for d in range(max(rank, 1), max_order + 1):
        H = _hankel(s, d)
        c, *_ = scipy.linalg.lstsq(H[:, :d], -H[:, d])
        full = np.append(c, 1.0)
        residual = float(np.max(np.abs(H @ full))) / ref
        if residual < residual_tol:
            return Annihilator(tuple(full))
        logger.debug("Order %d rejected, residual %.3e", d, residual)
    raise ModelOrderExceededError(f"no recurrence of order <= {max_order} fits the samples")


def unit_roots(a: Annihilator, cluster_tol: float = CLUSTER_TOL, *, radial_tol: float = RADIAL_TOL) -> FreqMult:
    """Roots of ``a`` as torus frequencies with multiplicities."""
    roots = a.roots()
    if roots.size == 0:
        return FreqMult()
    radial = np.abs(np.abs(roots) - 1.0)
    if np.any(radial > radial_tol):
        raise OffCircleRootError(f"root at radial distance {radial.max():.3g} from the unit circle")

    angles = np.mod(np.angle(roots) / (2 * np.pi), 1.0)
    order = np.argsort(angles)
    angles, roots = angles[order], roots[order]

    clusters: list[list[int]] = [[0]]
    for i in range(1, len(angles)):
        if angles[i] - angles[i - 1] < cluster_tol:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    if len(clusters) > 1 and angles[0] + 1.0 - angles[-1] < cluster_tol:
        clusters[0].extend(clusters.pop())

    entries = []
    for members in clusters:
        # the mean of a split multiple root is accurate to first order
        x = torus_reduce(np.angle(np.mean(roots[members])) / (2 * np.pi))
        entries.append((x, len(members)))
    entries.sort()
    return FreqMult(tuple(entries))


def _confluent_matrix(count: int, fm: FreqMult) -> np.ndarray:
    """Columns (n/L)^k exp(2 pi i x n) on n = 0..L, L = count - 1."""
    n = np.arange(count, dtype=float)
    unit = max(count - 1, 1)
    columns = []
    for x, mult in fm:
        wave = np.exp(2j * np.pi * x * n)
        columns.extend((n / unit) ** k * wave for k in range(mult))
    return np.column_stack(columns)


def confluent_solve(samples, fm: FreqMult, *, cond_limit: float = COND_LIMIT) -> ConfluentResult:
    """Least-squares coefficients of p_j in f(n) = sum_j p_j(n) exp(2 pi i x_j n).

    The basis is scaled to (n/L)^k, so ``cond_limit`` bounds the condition
    number of that matrix. Coefficients are returned in the monomial basis.
    """
    s = np.asarray(samples, dtype=complex).ravel()
    L = len(s) - 1
    if L + 1 < fm.order:
        raise InvalidParameterError(f"{L + 1} samples cannot determine {fm.order} coefficients")
    if fm.order == 0:
        return ConfluentResult(ExpPoly1D(), float(np.max(np.abs(s), initial=0.0)), 1.0)

    V = _confluent_matrix(L + 1, fm)
    condition = float(np.linalg.cond(V))
    if not np.isfinite(condition) or condition > cond_limit:
        raise ConditioningError(f"confluent system condition number {condition:.3g} exceeds {cond_limit:.3g}")

    coef, *_ = scipy.linalg.lstsq(V, s)
    residual = float(np.max(np.abs(V @ coef - s)))

    unit = max(L, 1)
    terms = []
    pos = 0
    for x, mult in fm:
        scaled = coef[pos : pos + mult] / unit ** np.arange(mult)
        terms.append((x, Poly1D(tuple(scaled))))
        pos += mult
    return ConfluentResult(ExpPoly1D(tuple(terms)), residual, condition)


def refine_frequencies(samples, fm: FreqMult, *, cond_limit: float = COND_LIMIT) -> ConfluentResult:
    """Polish the frequencies of ``fm`` by nonlinear least squares.

    Coefficients are eliminated by a linear solve at every step, so only the
    frequencies are free. Multiplicities are kept.
    """
    s = np.asarray(samples, dtype=complex).ravel()
    if len(fm) == 0:
        return confluent_solve(s, fm, cond_limit=cond_limit)
    mults = [m for _, m in fm]

    def misfit(xs: np.ndarray) -> np.ndarray:
        V = _confluent_matrix(len(s), FreqMult(tuple(zip(xs, mults))))
        coef, *_ = scipy.linalg.lstsq(V, s)
        r = V @ coef - s
        return np.concatenate([r.real, r.imag])

    start = np.array([x for x, _ in fm])
    fit = scipy.optimize.least_squares(misfit, start, jac="3-point", xtol=1e-14, ftol=1e-14, gtol=1e-14)
    polished = FreqMult(tuple(sorted((torus_reduce(x), m) for x, m in zip(fit.x, mults))))
    logger.debug("Frequency polish moved by %.3e", float(np.max(np.abs(fit.x - start))))
    return confluent_solve(s, polished, cond_limit=cond_limit)


def _clusterings(a: Annihilator, D: int, cluster_tol: float):
    """Root clusterings from coarse to fine.

    A root of multiplicity m is split by roughly eps**(1/m) under rounding,
    so the ladder starts at ``cluster_tol ** (1/D)`` and ends at ``cluster_tol``.
    """
    seen = set()
    for tol in np.geomspace(cluster_tol ** (1.0 / D), cluster_tol, 4 * D - 3):
        fm = unit_roots(a, float(tol))
        if fm.entries not in seen:
            seen.add(fm.entries)
            yield fm


def recover_exppoly1d(
    samples,
    N: int,
    D: int,
    *,
    scale: float | None = None,
    tol: float = FIT_TOL,
    cluster_tol: float = CLUSTER_TOL,
) -> ExpPoly1D:
    """Recover f from its values on {0, ..., 2ND}.

    Clusterings of the annihilator roots are tried from coarse to fine and the
    first whose model fits the samples within ``tol`` (relative to ``scale``,
    or to the largest sample) wins. A clustering that misses is polished with
    ``refine_frequencies`` before the next, finer one is tried. Any fit worse
    than ``FIT_TOL`` is polished, even when a looser ``tol`` would accept it.
    """
    s = np.asarray(samples, dtype=complex).ravel()
    if N < 1 or D < 1:
        raise InvalidParameterError(f"N and D must be >= 1, got N={N}, D={D}")
    if len(s) != 2 * N * D + 1:
        raise InvalidParameterError(f"expected {2 * N * D + 1} samples on [2ND]_0, got {len(s)}")

    a = annihilator(s, N * D, residual_tol=tol, zero_tol=0.1 * tol, scale=scale)
    if a.degree == 0:
        return ExpPoly1D()

    ref = max(float(np.max(np.abs(s))), scale or 0.0)
    violation: str | None = None
    failure: RecoveryError | None = None
    for fm in _clusterings(a, D, cluster_tol):
        if len(fm) > N:
            violation = f"recovered {len(fm)} frequencies, bound is N={N}"
            continue
        if any(m > D for _, m in fm):
            violation = f"coefficient degree reaches {max(m for _, m in fm) - 1}, bound is < {D}"
            continue
        try:
            result = confluent_solve(s, fm)
        except ConditioningError as err:
            failure = err
            continue
        if result.residual > min(tol, FIT_TOL) * ref:
            try:
                polished = refine_frequencies(s, fm)
            except ConditioningError:
                polished = result
            if polished.residual < result.residual:
                result = polished
        if result.residual <= tol * ref:
            return result.poly
        failure = RecoveryError(f"recovered model misses the samples by {result.residual:.3e}")
        logger.debug("Clustering %s rejected: %s", fm.entries, failure)

    if failure is not None:
        raise failure
    raise ModelBoundViolationError(violation or "no root clustering respects the model bounds")
