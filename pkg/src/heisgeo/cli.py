"""Command-line front end.

Exit codes: 0 ok, 1 I/O error, 2 usage error, 3 non-convergence,
4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import curve_io, svgplot, verify
from .geodesic_solver import SolverConfig, solve_cc_geodesic, solve_koranyi_polyline
from .heisenberg import example_geodesic, example_geodesic_derivative, horizontal_lift, koranyi_distance
from .metric_core import DEFAULT_LENGTH_TOL, SampledCurve, arclength_reparametrize, curve_length, euclidean_distance

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_NONCONVERGED, EXIT_VERIFY = 0, 1, 2, 3, 4
DEFAULT_SEED = 7
METRICS = {"koranyi": koranyi_distance, "euclidean": euclidean_distance}


@dataclass
class RunConfig:
    subcommand: str
    inputs: list = field(default_factory=list)
    out: Optional[Path] = None
    tol: float = DEFAULT_LENGTH_TOL
    n_steps: int = 256
    n_vertices: int = 64
    seed: int = DEFAULT_SEED
    fmt: str = "json"
    metric: str = "koranyi"


def default_seed() -> int:
    value = os.environ.get("HEISGEO_SEED")
    return int(value) if value else DEFAULT_SEED


def run_config(args) -> RunConfig:
    """Collect the parsed flags into a :class:`RunConfig`."""
    seed = getattr(args, "seed", None)
    inputs = [getattr(args, k) for k in ("p", "q", "curve") if getattr(args, k, None) is not None]
    return RunConfig(
        subcommand=args.subcommand,
        inputs=inputs,
        out=getattr(args, "out", None),
        tol=getattr(args, "tol", DEFAULT_LENGTH_TOL),
        n_steps=getattr(args, "n_steps", 256),
        n_vertices=getattr(args, "n_vertices", None) or 64,
        seed=default_seed() if seed is None else seed,
        fmt=getattr(args, "format", "json"),
        metric=getattr(args, "metric", "koranyi"),
    )


def parse_point(text: str) -> np.ndarray:
    parts = text.split(",")
    try:
        values = [float(v) for v in parts]
    except ValueError:
        values = []
    if len(values) != 3 or " " in text or not np.all(np.isfinite(values)):
        raise argparse.ArgumentTypeError(f"expected a point like 0,0,1.5 but got {text!r}")
    return np.array(values)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heisgeo", description="Heisenberg group curve toolkit")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, *names):
        if "metric" in names:
            p.add_argument("--metric", choices=sorted(METRICS), default="koranyi")
        if "tol" in names:
            p.add_argument("--tol", type=float, default=DEFAULT_LENGTH_TOL)
        if "out" in names:
            p.add_argument("--out", type=Path, default=None)
        if "format" in names:
            p.add_argument("--format", choices=["json", "csv", "svg"], default="json")
        if "seed" in names:
            p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("dist", help="Koranyi distance between two points")
    p.add_argument("p", type=parse_point)
    p.add_argument("q", type=parse_point)

    p = sub.add_parser("length", help="metric length of a curve file by dyadic refinement")
    p.add_argument("curve", type=Path)
    p.add_argument("--max-levels", type=int, default=16)
    common(p, "metric", "tol", "out")

    p = sub.add_parser("lift", help="horizontal lift of the planar part of a curve file")
    p.add_argument("curve", type=Path)
    p.add_argument("--z0", type=float, default=0.0)
    common(p, "out", "format")

    p = sub.add_parser("reparam", help="arc-length reparametrization onto [0, 1]")
    p.add_argument("curve", type=Path)
    common(p, "metric", "out", "format")

    p = sub.add_parser("geodesic", help="approximate shortest curve between two points")
    p.add_argument("p", type=parse_point)
    p.add_argument("q", type=parse_point)
    p.add_argument("--N", type=int, default=256, dest="n_steps")
    p.add_argument("--M", type=int, default=None, dest="n_vertices",
                   help="solve for a Koranyi polyline with M vertices instead")
    common(p, "seed", "out", "format")

    sub.add_parser("verify", help="run the verification suite")

    p = sub.add_parser("plot", help="SVG plots and convergence CSV for a curve (default: the example)")
    p.add_argument("curve", type=Path, nargs="?")
    common(p, "metric", "tol", "out")
    return parser


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _curve_text(curve: SampledCurve, fmt: str) -> str:
    if fmt == "svg":
        return svgplot.planar_projection_svg(curve.points)
    return curve_io.format_curve(curve, fmt)


def cmd_dist(args) -> int:
    print(f"{float(koranyi_distance(args.p, args.q)):.12g}")
    return EXIT_OK


def cmd_length(args) -> int:
    curve = curve_io.read_curve(args.curve)
    report = curve_length(curve, curve.interval, METRICS[args.metric], args.tol, args.max_levels)
    _emit(json.dumps(report.to_dict()) + "\n", args.out)
    return EXIT_OK if report.converged else EXIT_NONCONVERGED


def cmd_lift(args) -> int:
    curve = curve_io.read_curve(args.curve)
    planar_d = None if curve.derivatives is None else curve.derivatives[:, :2]
    lifted = horizontal_lift(curve.grid, curve.points[:, :2], args.z0, planar_d)
    _emit(_curve_text(lifted, args.format), args.out)
    return EXIT_OK


def cmd_reparam(args) -> int:
    curve = curve_io.read_curve(args.curve)
    _emit(_curve_text(arclength_reparametrize(curve, METRICS[args.metric]), args.format), args.out)
    return EXIT_OK


def cmd_geodesic(args) -> int:
    run = run_config(args)
    config = SolverConfig(seed=run.seed)
    if args.n_vertices is not None:
        report = solve_koranyi_polyline(args.p, args.q, run.n_vertices, config)
        _emit(json.dumps(report.to_dict()) + "\n", args.out)
        return EXIT_OK if report.converged else EXIT_NONCONVERGED
    report = solve_cc_geodesic(args.p, args.q, run.n_steps, config)
    if run.fmt == "json":
        text = report.to_json() + "\n"
    else:
        text = _curve_text(report.curve.to_sampled_curve(), args.format)
    _emit(text, args.out)
    return EXIT_OK if report.converged else EXIT_NONCONVERGED


def cmd_verify(args) -> int:
    results = verify.run_all()
    print(verify.format_table(results))
    failed = [r.name for r in results if not r.passed]
    if failed:
        print("failed: " + "; ".join(failed), file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_plot(args) -> int:
    outdir = args.out or Path(".")
    outdir.mkdir(parents=True, exist_ok=True)
    if args.curve is None:
        curve = SampledCurve.from_function(example_geodesic, np.linspace(0, 1, 513), example_geodesic_derivative)
        evaluator = example_geodesic
    else:
        curve = curve_io.read_curve(args.curve)
        evaluator = curve
    (outdir / "planar.svg").write_text(svgplot.planar_projection_svg(curve.points))
    (outdir / "height.svg").write_text(svgplot.height_svg(curve.t, curve.points))
    report = curve_length(evaluator, curve.interval, METRICS[args.metric], args.tol)
    with open(outdir / "convergence.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["level", "intervals", "polygonal_length"])
        for level, value in enumerate(report.history):
            writer.writerow([level, 2**level, f"{value:.17g}"])
    print(f"wrote planar.svg, height.svg, convergence.csv to {outdir}")
    return EXIT_OK


COMMANDS = {
    "dist": cmd_dist,
    "length": cmd_length,
    "lift": cmd_lift,
    "reparam": cmd_reparam,
    "geodesic": cmd_geodesic,
    "verify": cmd_verify,
    "plot": cmd_plot,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.subcommand](args)
    except OSError as exc:
        print(f"heisgeo: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"heisgeo: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
