"""Command-line entry point.

``run(argv)`` never exits the interpreter; it returns a CommandResult whose
exit code is 0 on success, 1 for domain errors and 2 for usage errors.
"""

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

from prony2d.analysis.synth import trial_rng
from prony2d.config import get_log_level, validate_config
from prony2d.errors import Prony2DError, SingularDirectionError
from prony2d.geometry.fourier import bb_transform, ft_triangle_oracle
from prony2d.geometry.generate import random_rectilinear_polygon, random_star_polygon
from prony2d.geometry.polygon import SlopeSet, polygon_slopes, shoelace_area
from prony2d.pipeline.identify import identify_polygon_report, sample_polygon
from prony2d.pipeline.uniqueness import (
    MODES,
    run_exppoly_uniqueness_campaign,
    run_polygon_uniqueness_campaign,
    verify_uniqueness,
)
from prony2d.store.codec import (
    lattice_from_csv,
    parse_lattice,
    polygon_from_dict,
    polygon_to_dict,
    read_json,
    samples_from_dict,
    samples_to_dict,
    slopes_from_dict,
    write_json,
)
from prony2d.store.plot import render_svg

logger = logging.getLogger(__name__)

ORACLE_RANGE = 20.0


@dataclass(frozen=True)
class CommandResult:
    exit_code: int
    outputs: tuple[str, ...] = ()
    summary: str = ""


def _lattice(name: str):
    if ":" not in name and Path(name).is_file():
        return lattice_from_csv(Path(name).read_text())
    return parse_lattice(name)


def _gen_polygon(args) -> CommandResult:
    rng = trial_rng(args.seed)
    if args.star:
        P = random_star_polygon(rng, args.max_vertices)
    else:
        P = random_rectilinear_polygon(rng, args.max_vertices)
    out = write_json(args.out, polygon_to_dict(P))
    return CommandResult(0, (str(out),), f"{len(P)}-vertex polygon, area {shoelace_area(P):.6f}")


def _sample(args) -> CommandResult:
    P = polygon_from_dict(read_json(args.polygon))
    samples = sample_polygon(P, _lattice(args.set))
    out = write_json(args.out, samples_to_dict(samples))
    return CommandResult(0, (str(out),), f"{len(samples)} samples on {args.set}")


def _recover(args) -> CommandResult:
    samples = samples_from_dict(read_json(args.samples))
    slopes = SlopeSet.axis() if args.slopes == "axis" else slopes_from_dict(read_json(args.slopes))
    found = identify_polygon_report(samples, slopes, args.bound)
    outputs = [str(write_json(args.out, polygon_to_dict(found.polygon)))]
    if args.report:
        outputs.append(str(write_json(args.report, found.to_dict())))
    return CommandResult(
        0,
        tuple(outputs),
        f"{len(found.polygon)}-vertex polygon, verification residual {found.verification_residual:.2e}",
    )


def _verify_uniqueness(args) -> CommandResult:
    P1 = polygon_from_dict(read_json(args.p1))
    P2 = polygon_from_dict(read_json(args.p2))
    report = verify_uniqueness(P1, P2, args.k, args.bound, args.mode)
    outputs = (str(write_json(args.out, report.to_dict())),) if args.out else ()
    return CommandResult(
        0,
        outputs,
        f"{report.verdict} on {report.sampling_set}: max difference {report.max_difference:.3e}",
    )


def _oracle_check(args) -> CommandResult:
    """Largest relative gap between the vertex-sum transform and triangle integration."""
    P = polygon_from_dict(read_json(args.polygon))
    rng = trial_rng(args.seed)
    worst = abs(ft_triangle_oracle(P, (0.0, 0.0)) - shoelace_area(P))
    checked = 0
    while checked < args.trials:
        t = rng.uniform(-ORACLE_RANGE, ORACLE_RANGE, size=2)
        try:
            fast = bb_transform(P, t)
        except SingularDirectionError:
            continue
        exact = ft_triangle_oracle(P, t)
        worst = max(worst, abs(fast - exact) / (1.0 + abs(exact)))
        checked += 1
    logger.info("Oracle check on %d points, %d slopes", checked, len(polygon_slopes(P)))
    return CommandResult(0, (), f"max discrepancy {worst:.3e} over {checked} points")


def _plot(args) -> CommandResult:
    P = polygon_from_dict(read_json(args.polygon))
    A = _lattice(args.set) if args.set else None
    out = render_svg(args.out, P, A, label=args.set or "")
    return CommandResult(0, (str(out),), f"plot of {len(P)} vertices")


def _campaign(args) -> CommandResult:
    if args.kind == "polygon":
        summary = run_polygon_uniqueness_campaign(
            args.trials, args.seed, max_vertices=args.max_vertices, mode=args.mode, workers=args.workers
        )
    else:
        summary = run_exppoly_uniqueness_campaign(args.trials, args.seed, N=args.N, D=args.D, workers=args.workers)
    outputs = (str(write_json(args.out, summary.to_dict())),) if args.out else ()
    code = 0 if summary.ok else 1
    return CommandResult(
        code,
        outputs + tuple(summary.archived),
        f"{summary.kind}: {summary.trials} trials, {summary.failures} failures, "
        f"{len(summary.counterexamples)} counterexamples",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prony2d", description="Exponential-polynomial and polygon recovery.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-polygon", help="draw a random valid polygon")
    shape = gen.add_mutually_exclusive_group()
    shape.add_argument("--rectilinear", action="store_true", help="axis-parallel polyomino outline (default)")
    shape.add_argument("--star", action="store_true", help="star-shaped polygon with exactly --max-vertices vertices")
    gen.add_argument("--max-vertices", type=int, default=12)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(handler=_gen_polygon)

    sample = sub.add_parser("sample", help="Fourier samples of a polygon on a lattice set")
    sample.add_argument("--polygon", required=True)
    sample.add_argument("--set", required=True, help="polygon:k,N, layered:N,D or a CSV file of m,n rows")
    sample.add_argument("--out", required=True)
    sample.set_defaults(handler=_sample)

    recover = sub.add_parser("recover", help="identify a polygon from its samples")
    recover.add_argument("--samples", required=True)
    recover.add_argument("--slopes", default="axis", help="'axis' or a slopes JSON file")
    recover.add_argument("--bound", type=int, required=True, help="vertex bound N")
    recover.add_argument("--out", required=True)
    recover.add_argument("--report")
    recover.set_defaults(handler=_recover)

    verify = sub.add_parser("verify-uniqueness", help="compare two polygons on the uniqueness set")
    verify.add_argument("--p1", required=True)
    verify.add_argument("--p2", required=True)
    verify.add_argument("--k", type=int, required=True)
    verify.add_argument("--bound", type=int, required=True)
    verify.add_argument("--mode", choices=MODES, default="known")
    verify.add_argument("--out")
    verify.set_defaults(handler=_verify_uniqueness)

    oracle = sub.add_parser("oracle-check", help="vertex-sum transform against triangle integration")
    oracle.add_argument("--polygon", required=True)
    oracle.add_argument("--trials", type=int, default=20)
    oracle.add_argument("--seed", type=int, default=0)
    oracle.set_defaults(handler=_oracle_check)

    plot = sub.add_parser("plot", help="SVG of a polygon and optionally a sampling set")
    plot.add_argument("--polygon", required=True)
    plot.add_argument("--set")
    plot.add_argument("--out", required=True)
    plot.set_defaults(handler=_plot)

    campaign = sub.add_parser("campaign", help="randomized uniqueness campaign")
    campaign.add_argument("--kind", choices=("polygon", "exppoly"), default="polygon")
    campaign.add_argument("--trials", type=int, default=100)
    campaign.add_argument("--seed", type=int, default=0)
    campaign.add_argument("--mode", choices=MODES, default="known")
    campaign.add_argument("--max-vertices", type=int, default=8)
    campaign.add_argument("--N", type=int, default=3)
    campaign.add_argument("--D", type=int, default=2)
    campaign.add_argument("--workers", type=int)
    campaign.add_argument("--out")
    campaign.set_defaults(handler=_campaign)
    return parser


def run(argv: list[str]) -> CommandResult:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = 0 if exc.code in (0, None) else 2
        return CommandResult(code, (), "usage error" if code else "")
    try:
        return args.handler(args)
    except Prony2DError as err:
        logger.error("%s failed: %s", args.command, err)
        return CommandResult(1, (), f"{err.code}: {err}")
    except OSError as err:
        logger.error("%s failed: %s", args.command, err)
        return CommandResult(1, (), f"io-error: {err}")


def main() -> int:
    load_dotenv()
    logging.basicConfig(level=get_log_level())
    validate_config()
    result = run(sys.argv[1:])
    if result.summary:
        print(result.summary)
    for path in result.outputs:
        print(path)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
