"""Command-line interface.

Three subcommands:

  optimize    run one bound family (or all of them) on a polynomial
  benchmark   reproduce the recorded example suite, or stress random
              coercive quartics against the grid oracle
  certify     solve, extract an explicit certificate, verify it by
              sampling, and write it to a JSON file

Exit codes: 0 success, 2 malformed input, 3 solver failure, 4 problem size
beyond the configured budget.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

from . import benchmarks
from .certify import (
    CertificateRejectedError,
    extract_certificate,
    round_certificate,
    sample_soundness,
)
from .hierarchy import HierarchyReport, run_hierarchy
from .oracle import Box, grid_min
from .poly import ParseError, Polynomial, parse_polynomial
from .solver import BudgetExceededError, SolverSettings
from .tentacle import TentacleSpec, auto_radius

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_SOLVER = 3
EXIT_BUDGET = 4

BOUNDEDNESS_CAVEAT = (
    "note: tentacle bounds certify the global infimum only if the input is "
    "bounded from below; otherwise they converge to the infimum over the "
    "tentacle set"
)
GRADVAR_CAVEAT = (
    "note: the gradient-variety method assumes the minimum is attained; "
    "for inputs bounded below without a minimizer its value can exceed the "
    "global infimum"
)


def _read_input(text: str) -> str:
    if os.path.isfile(text):
        with open(text, "r", encoding="utf-8") as fh:
            return fh.read()
    return text


def _solver_settings(args) -> SolverSettings:
    return SolverSettings(
        tol_gap=args.tol_gap,
        tol_feas=args.tol_feas,
        max_iter=args.max_iter,
        max_block_size=args.max_block_size,
        max_constraints=args.max_constraints,
        verbose=args.verbose,
    )


def _format_value(v: float) -> str:
    if math.isnan(v):
        return "n/a"
    if v == float("-inf"):
        return "-infinity"
    if v == float("inf"):
        return "+infinity"
    return f"{v:.8g}"


def _report_rows(report: HierarchyReport) -> List[dict]:
    return [r.summary_dict() for r in report.results]


def _emit_report(report: HierarchyReport, fmt: str, out) -> None:
    if fmt == "json":
        json.dump(report.to_json_dict(), out, indent=2)
        out.write("\n")
    elif fmt == "csv":
        writer = csv.DictWriter(
            out,
            fieldnames=[
                "method", "level", "value", "status", "gap", "iterations",
                "wall_time", "note",
            ],
        )
        writer.writeheader()
        for row in _report_rows(report):
            writer.writerow(row)
    else:
        out.write(report.to_text() + "\n")


def _parse_poly_arg(args) -> Polynomial:
    text = _read_input(args.input)
    names = args.vars.split(",") if args.vars else None
    poly, used_names = parse_polynomial(text, names)
    if args.verbose:
        print(f"parsed over variables {used_names}: {poly.to_text(used_names)}")
    return poly


def cmd_optimize(args) -> int:
    try:
        f = _parse_poly_arg(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    settings = _solver_settings(args)
    radius = Fraction(args.radius)
    if args.auto_scale_radius:
        radius = auto_radius(f)
        print(f"auto-scaled radius: {radius}")
    levels = list(range(0, args.k_max + 1))
    methods = (
        ["sos", "principal", "higher", "ball", "gradvar"]
        if args.method == "all"
        else [args.method]
    )
    exit_code = EXIT_OK
    try:
        for method in methods:
            report = run_hierarchy(
                f,
                method=method,
                levels=levels if method != "gradvar" else [args.d],
                settings=settings,
                radius=radius,
                order=args.order,
            )
            _emit_report(report, args.format, sys.stdout)
            if method in ("principal", "higher"):
                print(BOUNDEDNESS_CAVEAT)
            if method == "gradvar":
                print(GRADVAR_CAVEAT)
            if any(
                r.status in ("numerical_error", "max_iterations")
                for r in report.results
            ):
                exit_code = EXIT_SOLVER
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    return exit_code


def cmd_benchmark(args) -> int:
    settings_override = None
    if args.use_cli_solver_settings:
        settings_override = _solver_settings(args)
    if args.suite == "random":
        return _random_benchmark(args)
    rows = []
    failures = 0
    for case in benchmarks.paper_suite():
        if args.case and case.name != args.case:
            continue
        levels = list(case.levels)
        if args.include_slow:
            levels += list(case.slow_levels)
        settings = settings_override or case.settings
        level_settings = None if settings_override else dict(case.level_settings)
        try:
            report = run_hierarchy(
                case.polynomial,
                method="principal",
                levels=levels,
                settings=settings,
                include_sos=True,
                level_settings=level_settings,
            )
        except BudgetExceededError as exc:
            print(f"{case.name}: budget exceeded: {exc}", file=sys.stderr)
            failures += 1
            continue
        for res in report.results:
            ref = case.reference.get(res.level)
            rows.append(
                {
                    "case": case.name,
                    "level": "sos" if res.level == -1 else res.level,
                    "value": None if math.isnan(res.value) else res.value,
                    "recorded": ref,
                    "status": res.status,
                    "wall_time": round(res.wall_time, 3),
                }
            )
        if case.note:
            rows.append({"case": case.name, "level": "note", "value": None,
                         "recorded": None, "status": case.note, "wall_time": None})
    if args.format == "json":
        json.dump(rows, sys.stdout, indent=2)
        print()
    else:
        print(f"{'case':>12} {'level':>6} {'value':>16} {'recorded':>12} {'status':>16} {'time[s]':>8}")
        for r in rows:
            val = _format_value(r["value"]) if r["value"] is not None else (
                "-infinity" if r["status"] == "infeasible" else "n/a")
            rec = "" if r["recorded"] is None else (
                "-infinity" if r["recorded"] == float("-inf") else f"{r['recorded']:.6g}")
            tm = "" if r["wall_time"] is None else f"{r['wall_time']:8.2f}"
            print(f"{r['case']:>12} {str(r['level']):>6} {val:>16} {rec:>12} {r['status']:>16} {tm:>8}")
        print("recorded values are historical solver outputs; comparisons are informational")
    return EXIT_OK if failures == 0 else EXIT_SOLVER


def _random_benchmark(args) -> int:
    from .hierarchy import compute_principal

    rng_seeds = [args.seed + i for i in range(20)]
    bad = 0
    print(f"{'seed':>6} {'relaxation':>14} {'grid_min':>14} {'sound':>6}")
    for seed in rng_seeds:
        f = benchmarks.random_coercive_quartic(seed)
        res = compute_principal(f, 2, settings=SolverSettings(max_iter=300))
        oracle = grid_min(f, Box.cube(2, 3.0), 301)
        sound = (not math.isfinite(res.value)) or res.value <= oracle.min_value + 1e-4
        bad += 0 if sound else 1
        print(
            f"{seed:>6} {_format_value(res.value):>14} "
            f"{oracle.min_value:>14.8f} {str(sound):>6}"
        )
    if bad:
        print(f"{bad} unsound bounds detected", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def cmd_certify(args) -> int:
    try:
        f = _parse_poly_arg(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    from .hierarchy import (
        compute_ball,
        compute_fsos,
        compute_gradvar,
        compute_higher,
        compute_principal,
    )

    settings = _solver_settings(args)
    radius = Fraction(args.radius)
    try:
        if args.method == "sos":
            result = compute_fsos(f, settings)
            spec = TentacleSpec("none", f)
        elif args.method == "principal":
            result = compute_principal(f, args.k_max, radius, settings)
            spec = TentacleSpec("principal", f, radius=radius)
        elif args.method == "higher":
            result = compute_higher(f, args.order, args.k_max, settings)
            spec = TentacleSpec("higher", f, order=args.order)
        elif args.method == "ball":
            result = compute_ball(f, radius, args.k_max, settings)
            spec = TentacleSpec("ball", f, radius=radius)
        else:
            result = compute_gradvar(f, args.d, settings)
            spec = TentacleSpec("gradient_variety", f)
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if result.status != "optimal":
        print(
            f"solver did not reach optimality (status {result.status}); "
            "no certificate extracted",
            file=sys.stderr,
        )
        return EXIT_SOLVER
    try:
        cert = extract_certificate(result.program, result.solution, args.eig_floor)
    except CertificateRejectedError as exc:
        print(f"certificate rejected: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    print(f"bound: {cert.bound:.10g}")
    print(f"residual_norm: {cert.residual_norm:.3e}")
    report = sample_soundness(
        f, cert, spec, samples=args.samples, seed=args.seed
    )
    print(
        f"soundness sampling: {report.feasible}/{report.samples} points in the "
        f"set, {report.violations} violations"
    )
    if args.rational_round:
        rounding = round_certificate(result.program, result.solution)
        if rounding.success:
            print(f"exact rational certificate found: bound = {rounding.bound}")
        else:
            print(f"rational rounding failed: {rounding.message}")
    if args.certificate_out:
        with open(args.certificate_out, "w", encoding="utf-8") as fh:
            fh.write(cert.to_json())
        print(f"certificate written to {args.certificate_out}")
    return EXIT_OK if report.violations == 0 else EXIT_SOLVER


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tentsos",
        description=(
            "Certified lower bounds on the global infimum of a polynomial "
            "via sums-of-squares relaxations over gradient tentacles"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_input=True):
        if with_input:
            p.add_argument("input", help="polynomial text or a path to a file")
            p.add_argument("--vars", help="comma-separated variable names")
        p.add_argument("--method", default="principal",
                       choices=["sos", "principal", "higher", "ball", "gradvar", "all"])
        p.add_argument("--k-max", type=int, default=2, dest="k_max",
                       help="highest multiplier level to solve")
        p.add_argument("--N", "--order", type=int, default=1, dest="order",
                       help="gradient tentacle order for --method higher")
        p.add_argument("--d", type=int, default=2,
                       help="multiplier degree for --method gradvar")
        p.add_argument("--radius", default="1",
                       help="radius for the principal and ball sets")
        p.add_argument("--auto-scale-radius", action="store_true",
                       help="pick the radius from the coefficient magnitudes")
        p.add_argument("--tol-gap", type=float, default=1e-8, dest="tol_gap")
        p.add_argument("--tol-feas", type=float, default=1e-8, dest="tol_feas")
        p.add_argument("--max-iter", type=int, default=200, dest="max_iter")
        p.add_argument("--max-block-size", type=int, default=300)
        p.add_argument("--max-constraints", type=int, default=5000)
        p.add_argument("--format", default="text", choices=["text", "json", "csv"])
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--verbose", action="store_true")

    opt = sub.add_parser("optimize", help="run a relaxation hierarchy")
    common(opt)
    opt.set_defaults(fn=cmd_optimize)

    bench = sub.add_parser("benchmark", help="run the example suite")
    bench.add_argument("--suite", default="paper", choices=["paper", "random"])
    bench.add_argument("--case", help="restrict the paper suite to one example")
    bench.add_argument("--include-slow", action="store_true",
                       help="also solve the large flagged levels")
    bench.add_argument("--use-cli-solver-settings", action="store_true",
                       help="override the per-example solver settings")
    common(bench, with_input=False)
    bench.set_defaults(fn=cmd_benchmark)

    cert = sub.add_parser("certify", help="extract and verify a certificate")
    common(cert)
    cert.add_argument("--certificate-out", help="path for the certificate JSON")
    cert.add_argument("--samples", type=int, default=10000,
                      help="sampling budget for the soundness check")
    cert.add_argument("--eig-floor", type=float, default=1e-7,
                      help="Gram eigenvalue rejection floor")
    cert.add_argument("--rational-round", action="store_true",
                      help="attempt an exact rational certificate")
    cert.set_defaults(fn=cmd_certify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad flags, which matches the parse-error code
        return int(exc.code) if exc.code else 0
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
