"""Uniqueness checks on sampling sets and the randomized campaigns built on them.

A campaign draws pairs of distinct models, samples both on the set that is
supposed to tell them apart and reports every pair it cannot separate.
"""

import concurrent.futures
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

from prony2d.analysis.expoly import (
    ExpPoly2D,
    Poly2D,
    Term2D,
    TorusFreq,
    exppoly2d_allclose,
    linear_combine,
    torus_distance,
)
from prony2d.analysis.sampling import LatticeSet2D, layered_grid, polygon_grid
from prony2d.analysis.synth import random_exppoly2d, trial_rng
from prony2d.config import get_archive_dir, get_workers
from prony2d.errors import InvalidParameterError, Prony2DError
from prony2d.geometry.fourier import ft_polygon
from prony2d.geometry.generate import random_rectilinear_polygon
from prony2d.geometry.polygon import Polygon, polygon_slopes
from prony2d.store.codec import dump_json, exppoly2d_to_dict, polygon_to_dict

logger = logging.getLogger(__name__)

KNOWN_SLOPES = "known"
UNKNOWN_SLOPES = "unknown"
MODES = (KNOWN_SLOPES, UNKNOWN_SLOPES)

DISTINGUISH_TOL = 1e-9
FAMILY_TOL = 1e-8
FREQ_TOL = 1e-7

DISTINCT = "distinct-confirmed"
INDISTINGUISHABLE = "indistinguishable-on-set"


@dataclass(frozen=True)
class UniquenessReport:
    sampling_set: str
    set_size: int
    max_difference: float
    argmax: tuple[int, int]
    tolerance: float

    @property
    def verdict(self) -> str:
        return DISTINCT if self.max_difference > self.tolerance else INDISTINGUISHABLE

    def to_dict(self) -> dict:
        return {
            "sampling_set": self.sampling_set,
            "set_size": self.set_size,
            "max_difference": self.max_difference,
            "argmax": list(self.argmax),
            "tolerance": self.tolerance,
            "verdict": self.verdict,
        }


def _difference_report(label: str, A: LatticeSet2D, v1: np.ndarray, v2: np.ndarray) -> UniquenessReport:
    diff = np.abs(v1 - v2)
    peak = max(float(np.max(np.abs(v1))), float(np.max(np.abs(v2))))
    i = int(np.argmax(diff))
    return UniquenessReport(
        sampling_set=label,
        set_size=len(A),
        max_difference=float(diff[i]),
        argmax=A.points[i],
        tolerance=DISTINGUISH_TOL * (1.0 + peak),
    )


def uniqueness_set(k: int, N: int, mode: str) -> tuple[str, LatticeSet2D]:
    """Known slopes use A(k, N); unknown slopes use A(2k, 2N), which covers every difference."""
    if mode == KNOWN_SLOPES:
        return f"polygon:{k},{N}", polygon_grid(k, N)
    if mode == UNKNOWN_SLOPES:
        return f"polygon:{2 * k},{2 * N}", polygon_grid(2 * k, 2 * N)
    raise InvalidParameterError(f"mode must be one of {', '.join(MODES)}, got {mode!r}")


def _check_bounds(P: Polygon, k: int, N: int, name: str) -> None:
    if len(P) > N:
        raise InvalidParameterError(f"{name} has {len(P)} vertices, bound is N={N}")
    used = len(polygon_slopes(P))
    if used > k:
        raise InvalidParameterError(f"{name} uses {used} slopes, bound is k={k}")


def verify_uniqueness(P1: Polygon, P2: Polygon, k: int, N: int, mode: str = KNOWN_SLOPES) -> UniquenessReport:
    _check_bounds(P1, k, N, "P1")
    _check_bounds(P2, k, N, "P2")
    label, A = uniqueness_set(k, N, mode)
    points = A.as_array()
    report = _difference_report(label, A, ft_polygon(P1, points), ft_polygon(P2, points))
    logger.debug("%s on %s: max difference %.3e", report.verdict, label, report.max_difference)
    return report


@dataclass(frozen=True)
class FamilyCheck:
    ok: bool
    diagnostic: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _on_set(f: ExpPoly2D, A: LatticeSet2D) -> np.ndarray:
    return f.evaluate(A.as_array())


def _covered(freq: TorusFreq, pool: list[TorusFreq]) -> bool:
    return any(torus_distance(freq.x, p.x) < FREQ_TOL and torus_distance(freq.y, p.y) < FREQ_TOL for p in pool)


def f_lambda_family_check(
    f1: ExpPoly2D,
    f2: ExpPoly2D,
    A: LatticeSet2D,
    lambdas,
    *,
    tol: float = FAMILY_TOL,
) -> FamilyCheck:
    """Check the family lam*f1 + (1 - lam)*f2 for two models that agree on A.

    Every member must agree with f1 on A and draw its frequencies from those of
    f1 and f2; members for distinct lam must differ whenever f1 != f2.
    """
    base = _on_set(f1, A)
    scale = 1.0 + float(np.max(np.abs(base), initial=0.0))
    gap = float(np.max(np.abs(base - _on_set(f2, A)), initial=0.0))
    if gap > tol * scale:
        return FamilyCheck(False, f"f1 and f2 differ on the set by {gap:.3e}")

    pool = f1.frequencies + f2.frequencies
    members = []
    for lam in lambdas:
        member = linear_combine(lam, f1, f2)
        drift = float(np.max(np.abs(_on_set(member, A) - base), initial=0.0))
        if drift > tol * scale * (1.0 + abs(lam)):
            return FamilyCheck(False, f"lambda={lam} moves the values on the set by {drift:.3e}")
        stray = [t.freq for t in member.terms if not _covered(t.freq, pool)]
        if stray:
            return FamilyCheck(False, f"lambda={lam} has frequency {stray[0]} outside those of f1 and f2")
        members.append((lam, member))

    if exppoly2d_allclose(f1, f2):
        return FamilyCheck(True, "f1 equals f2; the family is constant")
    for i, (lam, member) in enumerate(members):
        for mu, other in members[i + 1 :]:
            if lam != mu and exppoly2d_allclose(member, other):
                return FamilyCheck(False, f"lambda={lam} and lambda={mu} give the same polynomial")
    return FamilyCheck(True, f"{len(members)} members agree on {len(A)} points")


def _missing_residue(values: np.ndarray, max_period: int) -> tuple[int, int] | None:
    for p in range(2, max_period + 1):
        present = set((values % p).tolist())
        for r in range(p):
            if r not in present:
                return p, r
    return None


def find_vanishing_difference(
    A: LatticeSet2D,
    *,
    rng: np.random.Generator | None = None,
    max_period: int = 16,
) -> ExpPoly2D:
    """A nonzero exponential polynomial with constant coefficients vanishing on A.

    If some residue r mod p never occurs in one coordinate of A, the filter
    sum_j exp(2 pi i j (m - r) / p) does the job with p terms. Otherwise
    |A| + 1 random frequencies always leave a null vector of the sampling matrix.
    """
    pts = A.as_array()
    for axis in (0, 1):
        found = _missing_residue(pts[:, axis], max_period)
        if found is None:
            continue
        p, r = found
        terms = []
        for j in range(p):
            freq = TorusFreq(j / p, 0.0) if axis == 0 else TorusFreq(0.0, j / p)
            terms.append(Term2D(freq, Poly2D.constant(np.exp(-2j * np.pi * j * r / p))))
        logger.debug("Residue %d mod %d is absent from coordinate %d", r, p, axis)
        return ExpPoly2D(tuple(terms), D=1)

    rng = rng if rng is not None else trial_rng(0)
    freqs = rng.random((len(pts) + 1, 2))
    V = np.exp(2j * np.pi * (pts @ freqs.T))
    kernel = scipy.linalg.null_space(V)
    coeffs = kernel[:, 0] / np.max(np.abs(kernel[:, 0]))
    terms = tuple(Term2D(TorusFreq(x, y), Poly2D.constant(c)) for (x, y), c in zip(freqs, coeffs))
    logger.debug("Null-space construction with %d frequencies", len(terms))
    return ExpPoly2D(terms, D=1)


@dataclass(frozen=True)
class TrialOutcome:
    index: int
    margin: float = float("inf")
    counterexample: dict | None = None
    error: str = ""


@dataclass
class CampaignSummary:
    kind: str
    seed: int
    trials: int
    failures: int = 0
    counterexamples: list[int] = field(default_factory=list)
    min_margin: float = float("inf")
    archived: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples and not self.failures

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "seed": self.seed,
            "trials": self.trials,
            "failures": self.failures,
            "counterexamples": list(self.counterexamples),
            "min_margin": self.min_margin,
            "archived": list(self.archived),
        }


def _same_polygon(P1: Polygon, P2: Polygon) -> bool:
    return {tuple(np.round(v, 12)) for v in P1.vertices} == {tuple(np.round(v, 12)) for v in P2.vertices}


def _polygon_trial(seed: int, index: int, max_vertices: int, mode: str) -> TrialOutcome:
    rng = trial_rng(seed, index)
    try:
        P1 = random_rectilinear_polygon(rng, max_vertices)
        P2 = random_rectilinear_polygon(rng, max_vertices)
        while _same_polygon(P1, P2):
            P2 = random_rectilinear_polygon(rng, max_vertices)
        report = verify_uniqueness(P1, P2, 2, max_vertices, mode)
    except Prony2DError as err:
        logger.warning("Trial %d failed: %s", index, err)
        return TrialOutcome(index, error=str(err))
    counterexample = None
    if report.verdict == INDISTINGUISHABLE:
        counterexample = {"p1": polygon_to_dict(P1), "p2": polygon_to_dict(P2), "report": report.to_dict()}
    return TrialOutcome(index, report.max_difference / report.tolerance, counterexample)


def _exppoly_trial(seed: int, index: int, N: int, D: int) -> TrialOutcome:
    rng = trial_rng(seed, index)
    f1 = random_exppoly2d(rng, N, D)
    f2 = random_exppoly2d(rng, N, D)
    while exppoly2d_allclose(f1, f2):
        f2 = random_exppoly2d(rng, N, D)
    A = layered_grid(2 * N, D)
    report = _difference_report(f"layered:{2 * N},{D}", A, _on_set(f1, A), _on_set(f2, A))
    counterexample = None
    if report.verdict == INDISTINGUISHABLE:
        counterexample = {"f1": exppoly2d_to_dict(f1), "f2": exppoly2d_to_dict(f2), "report": report.to_dict()}
    return TrialOutcome(index, report.max_difference / report.tolerance, counterexample)


def _run_campaign(kind: str, trial, trials: int, seed: int, workers: int | None, archive_dir: str | None):
    workers = workers or get_workers()
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
            outcomes = list(executor.map(trial, range(trials)))
    else:
        outcomes = [trial(i) for i in range(trials)]

    summary = CampaignSummary(kind=kind, seed=seed, trials=trials)
    for outcome in sorted(outcomes, key=lambda o: o.index):
        if outcome.error:
            summary.failures += 1
            continue
        summary.min_margin = min(summary.min_margin, outcome.margin)
        if outcome.counterexample is None:
            continue
        summary.counterexamples.append(outcome.index)
        folder = Path(archive_dir or get_archive_dir())
        folder.mkdir(parents=True, exist_ok=True)
        path = folder / f"{kind}-{seed}-{outcome.index}.json"
        path.write_text(dump_json({"seed": seed, "index": outcome.index, **outcome.counterexample}))
        summary.archived.append(str(path))
        logger.error("Counterexample in %s trial %d archived to %s", kind, outcome.index, path)

    logger.info(
        "%s campaign: %d trials, %d failures, %d counterexamples, min margin %.3g",
        kind,
        trials,
        summary.failures,
        len(summary.counterexamples),
        summary.min_margin,
    )
    return summary


def run_polygon_uniqueness_campaign(
    trials: int,
    seed: int,
    *,
    max_vertices: int = 8,
    mode: str = KNOWN_SLOPES,
    workers: int | None = None,
    archive_dir: str | None = None,
) -> CampaignSummary:
    """Pairs of distinct random axis-parallel polygons must differ on the mode's set.

    ``min_margin`` is the smallest ratio of max difference to tolerance.
    """
    uniqueness_set(2, max_vertices, mode)

    def trial(index: int) -> TrialOutcome:
        return _polygon_trial(seed, index, max_vertices, mode)

    return _run_campaign(f"polygon-{mode}", trial, trials, seed, workers, archive_dir)


def run_exppoly_uniqueness_campaign(
    trials: int,
    seed: int,
    *,
    N: int = 3,
    D: int = 2,
    workers: int | None = None,
    archive_dir: str | None = None,
) -> CampaignSummary:
    """Pairs of distinct random models with at most N terms must differ on layered_grid(2N, D)."""
    if N < 1 or D < 1:
        raise InvalidParameterError(f"N and D must be >= 1, got N={N}, D={D}")

    def trial(index: int) -> TrialOutcome:
        return _exppoly_trial(seed, index, N, D)

    return _run_campaign("exppoly", trial, trials, seed, workers, archive_dir)
