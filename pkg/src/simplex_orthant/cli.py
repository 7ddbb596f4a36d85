"""Command-line front end.

Subcommands
-----------
compute : f(n, rho) over a grid by a chosen method
bounds  : rate bounds, sandwich verdicts, and scaled ratios over a grid
simplex : vertex / union maximum experiments for random polynomials
verify  : run the invariant suites, emit a JSON summary

Numeric output uses shortest round-trip float formatting, so identical
configs produce byte-identical files; wall time goes to stderr only.
Exit codes: 0 success, 1 domain error, 2 resource error, 3 verification
failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time

from . import orthant, simplex, verify
from .simplex import ResourceBudgetError

NA = "NA"


def _parse_grid(text: str, cast):
    """Accept 'a,b,c' lists and 'start:stop:step' ranges (stop inclusive)."""
    if ":" in text:
        start, stop, step = (float(p) for p in text.split(":"))
        count = int(round((stop - start) / step)) + 1
        vals = [start + i * step for i in range(count) if start + i * step <= stop + 1e-12]
        return [cast(round(v, 12)) for v in vals]
    return [cast(p) for p in text.split(",")]


def _int_grid(text: str):
    return _parse_grid(text, lambda v: int(round(float(v))))


def _float_grid(text: str):
    return _parse_grid(text, float)


def _fmt(value):
    if value is None:
        return NA
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _emit(rows, columns, fmt, out, command, config):
    if fmt == "json":
        doc = {
            "command": command,
            "config": config,
            "columns": columns,
            "rows": [{c: row.get(c) for c in columns} for row in rows],
        }
        out.write(json.dumps(doc, indent=2))
        out.write("\n")
    elif fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(c)) for c in columns])
    elif fmt == "plotdata":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["x", "y", "series"])
        for row in rows:
            for x, y, series in row["_plot"]:
                writer.writerow([_fmt(x), _fmt(y), series])
    else:
        raise ValueError(f"unknown output format {fmt!r}")


def cmd_compute(args) -> list[dict]:
    quad = orthant.QuadratureSpec(nodes=args.nodes, rel_tol=args.rel_tol)
    rows = []
    for n in args.n:
        for rho in args.rho:
            if args.method == "closed":
                est = orthant.closed_form(n, rho)
                if est is None:
                    raise ValueError(f"no closed form for (n={n}, rho={rho})")
            elif args.method == "steck":
                est = orthant.steck_quadrature(n, rho, quad)
            elif args.method == "density":
                est = orthant.density_integral(n, rho, quad)
            else:
                if args.seed is None:
                    raise ValueError("--seed is required for --method mc")
                est = orthant.monte_carlo(
                    n, rho, args.trials, args.seed, threads=args.threads
                )
            rows.append(
                {
                    "n": n,
                    "rho": rho,
                    "method": est.method,
                    "value": est.value,
                    "std_error": est.std_error,
                    "count": est.count,
                    "_plot": [(n, est.value, f"rho={rho}")],
                }
            )
    return rows


COMPUTE_COLUMNS = ["n", "rho", "method", "value", "std_error", "count"]


def cmd_bounds(args) -> list[dict]:
    quad = orthant.QuadratureSpec(nodes=args.nodes, rel_tol=args.rel_tol)
    rows = []
    for n in args.n:
        for rho in args.rho:
            est = orthant.best_estimate(n, rho, quad)
            report = orthant.theorem_bounds(n, rho)
            sandwich = None
            if report.lower_applicable and report.upper_applicable:
                sandwich = report.lower <= est.value <= report.upper
            elif report.lower_applicable:
                sandwich = report.lower <= est.value
            ratio = orthant.scaled_ratio(n, rho, est.value) if 0 < est.value < 1 else None
            rows.append(
                {
                    "n": n,
                    "rho": rho,
                    "f": est.value,
                    "method": est.method,
                    "scale": report.scale if not math.isnan(report.scale) else None,
                    "lower": report.lower,
                    "upper": report.upper,
                    "lower_applicable": report.lower_applicable,
                    "upper_applicable": report.upper_applicable,
                    "upper_asymptotic": report.upper_asymptotic,
                    "sandwich_ok": sandwich,
                    "scaled_ratio": ratio,
                    "_plot": [
                        (n, est.value, f"f rho={rho}"),
                        (n, report.lower, f"lower rho={rho}"),
                        (n, report.upper, f"upper rho={rho}"),
                    ],
                }
            )
    return rows


BOUNDS_COLUMNS = [
    "n", "rho", "f", "method", "scale", "lower", "upper",
    "lower_applicable", "upper_applicable", "upper_asymptotic",
    "sandwich_ok", "scaled_ratio",
]


def cmd_simplex(args) -> list[dict]:
    if args.seed is None:
        raise ValueError("--seed is required for the simplex experiments")
    rows = []
    for n in args.n:
        vertex = simplex.estimate_vertex_probability(
            n, args.k, args.trials, args.seed, threads=args.threads
        )
        union = simplex.estimate_union_probability(
            n, args.k, args.trials, args.seed, threads=args.threads
        )
        rows.append(
            {
                "n": n,
                "k": args.k,
                "trials": args.trials,
                "seed": args.seed,
                "rho_n": simplex.rho_n(n, args.k),
                "vertex_estimate": vertex.estimate,
                "vertex_std_error": vertex.std_error,
                "union_estimate": union.estimate,
                "union_std_error": union.std_error,
                "analytic_f": union.analytic_f,
                "independence_approx": union.independence_approx,
                "tv_paper_literal": union.tv_paper_literal,
                "tv_corrected": union.tv_corrected,
                "envelope": union.envelope,
                "_plot": [
                    (n, vertex.estimate, "vertex"),
                    (n, union.estimate, "union"),
                    (n, union.independence_approx, "independence"),
                ],
            }
        )
    return rows


SIMPLEX_COLUMNS = [
    "n", "k", "trials", "seed", "rho_n",
    "vertex_estimate", "vertex_std_error",
    "union_estimate", "union_std_error",
    "analytic_f", "independence_approx",
    "tv_paper_literal", "tv_corrected", "envelope",
]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simplex-orthant",
        description="Orthant probabilities and vertex maxima of random polynomials",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    default_threads = int(os.environ.get("SIMPLEX_ORTHANT_THREADS", "1"))

    def common(p):
        p.add_argument("--format", choices=("csv", "json", "plotdata"), default="csv")
        p.add_argument("--output", default=None, help="output path (default stdout)")
        p.add_argument("--threads", type=int, default=default_threads)

    p = sub.add_parser("compute", help="f(n, rho) over a grid")
    common(p)
    p.add_argument("--n", type=_int_grid, required=True)
    p.add_argument("--rho", type=_float_grid, required=True)
    p.add_argument("--method", choices=("closed", "steck", "density", "mc"), default="steck")
    p.add_argument("--nodes", type=int, default=200)
    p.add_argument("--rel-tol", type=float, default=1e-10, dest="rel_tol")
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("bounds", help="rate bounds and sandwich verdicts")
    common(p)
    p.add_argument("--n", type=_int_grid, required=True)
    p.add_argument("--rho", type=_float_grid, required=True)
    p.add_argument("--nodes", type=int, default=200)
    p.add_argument("--rel-tol", type=float, default=1e-10, dest="rel_tol")

    p = sub.add_parser("simplex", help="vertex / union maximum experiments")
    common(p)
    p.add_argument("--n", type=_int_grid, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("verify", help="run the invariant suites")
    p.add_argument("--budget", choices=("quick", "full"), default="quick")
    p.add_argument("--output", default=None)
    p.add_argument("--suite", action="append", choices=verify.SUITES, default=None,
                   help="restrict to one or more named suites")
    p.add_argument("--inject-fault", choices=("lemma-sign",), default=None,
                   dest="inject_fault", help=argparse.SUPPRESS)
    return parser


def _config_dict(args) -> dict:
    skip = {"command", "format", "output"}
    return {
        key: value
        for key, value in sorted(vars(args).items())
        if key not in skip and not key.startswith("_")
    }


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = time.monotonic()

    if args.command == "verify":
        summary = verify.run_all(
            args.budget, inject_fault=args.inject_fault, only=args.suite
        )
        text = json.dumps(summary, indent=2) + "\n"
        if args.output:
            with open(args.output, "w", encoding="utf-8") as handle:
                handle.write(text)
        else:
            sys.stdout.write(text)
        print(f"verify: {time.monotonic() - started:.1f}s", file=sys.stderr)
        return 0 if summary["all_passed"] else 3

    if args.command == "compute":
        rows, columns = cmd_compute(args), COMPUTE_COLUMNS
    elif args.command == "bounds":
        rows, columns = cmd_bounds(args), BOUNDS_COLUMNS
    else:
        rows, columns = cmd_simplex(args), SIMPLEX_COLUMNS

    buffer = io.StringIO()
    _emit(rows, columns, args.format, buffer, args.command, _config_dict(args))
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as handle:
            handle.write(buffer.getvalue())
    else:
        sys.stdout.write(buffer.getvalue())
    print(f"{args.command}: {time.monotonic() - started:.1f}s", file=sys.stderr)
    return 0


def main(argv=None) -> None:
    try:
        sys.exit(run(argv))
    except ResourceBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(2)
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main()
