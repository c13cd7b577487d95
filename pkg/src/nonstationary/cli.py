"""Command-line front end.

Subcommands::

    solve             run one method and print its trace
    compare           run several methods side by side
    analyze           orders r_k of the order equation with efficiency indices
    reproduce-table1  recompute the published iterate table and check it

Exit status: 0 success, 1 usage or input error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
from decimal import Decimal, InvalidOperation
from pathlib import Path

from . import analysis, report, table1
from .expr import ParseError
from .methods import METHODS, IterationError, MethodConfig, Problem, run_method
from .numctx import DEFAULT_PRECISION, DomainError, NumericContext, PrecisionError

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERIC = 2

DEFAULTS = {
    "function": None,
    "method": None,
    "methods": ",".join(METHODS),
    "points": None,
    "precision": DEFAULT_PRECISION,
    "tol": None,
    "max_iter": 60,
    "root_hint": None,
    "output": "table",
    "places": 10,
}
_INT_KEYS = ("precision", "max_iter", "places")


class UsageError(Exception):
    pass


def read_config(path: str | Path) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment; dashes in keys become underscores."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def resolve_options(args: argparse.Namespace) -> dict:
    """Merge flags over the config file over defaults."""
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            merged.update(read_config(args.config))
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    for key in _INT_KEYS:
        try:
            merged[key] = int(merged[key])
        except (TypeError, ValueError):
            raise UsageError(f"{key.replace('_', '-')} must be an integer, got {merged[key]!r}") from None
    if merged["output"] not in ("table", "csv", "json"):
        raise UsageError(f"unknown output format {merged['output']!r}")
    return merged


def _points(opts) -> list[str]:
    if not opts["points"]:
        raise UsageError("--points is required")
    return [p.strip() for p in str(opts["points"]).split(",") if p.strip()]


def _problem(opts) -> Problem:
    if not opts["function"]:
        raise UsageError("--function is required")
    ctx = NumericContext(opts["precision"])
    return Problem(opts["function"], ctx, root_hint=opts["root_hint"])


def _config(opts, points) -> MethodConfig:
    return MethodConfig(tuple(points), tol_step=opts["tol"], tol_residual=opts["tol"], max_iterations=opts["max_iter"])


def _hint_floor(root_hint: str | None) -> str | None:
    """Errors below ten units in the last digit of the root hint are not trusted."""
    if root_hint is None:
        return None
    try:
        exponent = Decimal(str(root_hint).strip()).as_tuple().exponent
    except InvalidOperation:
        return None
    return f"1e{exponent + 1}" if isinstance(exponent, int) else None


def _summaries(name, trace, ctx, root_hint=None):
    try:
        empirical = analysis.empirical_order(trace, ctx, floor=_hint_floor(root_hint))
    except analysis.InsufficientData:
        # Too few errors above the hint's accuracy: fall back to step lengths.
        try:
            empirical = analysis.empirical_order(trace, ctx, proxy=True)
        except analysis.InsufficientData:
            empirical = []
    spec = METHODS[name]
    indices = analysis.efficiency_indices(analysis.theoretical_order(spec, ctx), spec.horner_units, ctx)
    return empirical, indices


# -- solve ------------------------------------------------------------------------


def cmd_solve(opts, out) -> int:
    if not opts["method"]:
        raise UsageError("--method is required")
    if opts["method"] not in METHODS:
        raise UsageError(f"unknown method {opts['method']!r}; choose from {', '.join(METHODS)}")
    points = _points(opts)
    problem = _problem(opts)
    ctx = problem.ctx
    failure = None
    try:
        trace = run_method(opts["method"], problem, _config(opts, points))
    except IterationError as exc:
        failure = exc
        trace = exc.trace
    empirical, indices = _summaries(opts["method"], trace, ctx, opts["root_hint"])
    fmt = opts["output"]
    if fmt == "csv":
        out.write(report.render_csv(trace, ctx))
    elif fmt == "json":
        payload = report.trace_payload(
            trace, ctx, function=problem.source, points=points, empirical=empirical, indices=indices
        )
        if failure is not None:
            payload["error"] = str(failure)
        out.write(report.render_json(payload))
    else:
        out.write(f"method: {trace.method}\nfunction: {problem.source}\n")
        out.write(report.render_table(trace, ctx, opts["places"]) + "\n")
        term = trace.termination.value if trace.termination else "error"
        out.write(f"termination: {term} after {trace.iterations} iterations, {trace.total_horner_units} Horner units\n")
        if empirical:
            out.write(f"empirical order (last Wall ratio): {ctx.format_fixed(empirical[-1], 4)}\n")
        if failure is not None:
            out.write(f"error: {failure}\n")
    if failure is not None or not trace.converged:
        if failure is None and fmt == "table":
            out.write(f"error: {trace.message or 'no convergence'}\n")
        return EXIT_NUMERIC
    return EXIT_OK


# -- compare ------------------------------------------------------------------------


def _run_one(name, problem, opts, points):
    n = METHODS[name].n_points
    if len(points) < n:
        return name, None, f"needs {n} points, got {len(points)}"
    try:
        trace = run_method(name, problem, _config(opts, points[-n:]))
    except IterationError as exc:
        return name, exc.trace, str(exc)
    except (ValueError, DomainError) as exc:
        return name, None, str(exc)
    return name, trace, None if trace.converged else (trace.message or trace.termination.value)


def cmd_compare(opts, out) -> int:
    names = [m.strip() for m in str(opts["methods"]).split(",") if m.strip()]
    unknown = [m for m in names if m not in METHODS]
    if unknown or not names:
        raise UsageError(f"unknown method(s) {', '.join(unknown)}; choose from {', '.join(METHODS)}")
    points = _points(opts)
    problem = _problem(opts)
    ctx = problem.ctx
    # Derivatives are built up front so worker threads only read the cache.
    problem.derivative(max(METHODS[m].horner_units for m in names) - 1)
    with concurrent.futures.ThreadPoolExecutor() as pool:
        results = list(pool.map(lambda m: _run_one(m, problem, opts, points), names))

    rows = []
    for name, trace, error in results:
        empirical, indices = ([], None)
        if trace is not None:
            empirical, indices = _summaries(name, trace, ctx, opts["root_hint"])
        rows.append((name, trace, error, empirical, indices))

    fmt = opts["output"]
    if fmt == "json":
        payload = {"function": problem.source, "points": points, "precision": ctx.precision_digits, "methods": []}
        for name, trace, error, empirical, indices in rows:
            entry = {"method": name, "error": error}
            if trace is not None:
                entry["trace"] = report.trace_payload(
                    trace, ctx, function=problem.source, points=points[-METHODS[name].n_points :],
                    empirical=empirical, indices=indices,
                )
            payload["methods"].append(entry)
        out.write(report.render_json(payload))
    else:
        header = ["method", "iterations", "horner", "emp.order", "p", "d", "I1", "I2", "I3", "status"]
        table = []
        for name, trace, error, empirical, indices in rows:
            spec = METHODS[name]
            idx = indices or analysis.efficiency_indices(analysis.theoretical_order(spec, ctx), spec.horner_units, ctx)
            table.append([
                name,
                "-" if trace is None else str(trace.iterations),
                "-" if trace is None else str(trace.total_horner_units),
                ctx.format_fixed(empirical[-1], 4) if empirical else "-",
                ctx.format_fixed(idx.p, 4),
                str(idx.d),
                ctx.format_fixed(idx.I1, 4),
                ctx.format_fixed(idx.I2, 4),
                ctx.format_fixed(idx.I3, 4),
                error or trace.termination.value,
            ])
        if fmt == "csv":
            w = [",".join(header)] + [",".join(r) for r in table]
            out.write("\n".join(w) + "\n")
        else:
            widths = [max(len(r[c]) for r in table + [header]) for c in range(len(header))]
            out.write(f"function: {problem.source}\npoints: {', '.join(points)}\n")
            out.write("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip() + "\n")
            for r in table:
                out.write("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() + "\n")
    return EXIT_OK if all(error is None for _, _, error, _, _ in rows) else EXIT_NUMERIC


# -- analyze --------------------------------------------------------------------------


def analyze_rows(s: int, n_max: int, ctx: NumericContext):
    rows = []
    for k, r in enumerate(analysis.order_sequence(s, n_max, ctx=ctx), 1):
        rep = analysis.efficiency_indices(r, s, ctx)
        rows.append((str(k), r, rep.I1, rep.I2, rep.I3))
    limit = analysis.efficiency_indices(s + 1, s, ctx)
    rows.append(("limit", limit.p, limit.I1, limit.I2, limit.I3))
    return rows


def cmd_analyze(args, out) -> int:
    if args.s < 1 or args.n_max < 1:
        raise UsageError("--s and --n-max must be at least 1")
    ctx = NumericContext(max(40, args.precision))
    rows = analyze_rows(args.s, args.n_max, ctx)
    header = ("k", "r_k", "I1", "I2", "I3")
    if args.output == "json":
        payload = {
            "s": args.s,
            "rows": [dict(zip(header, [k] + [ctx.decimal_string(v, 20) for v in vals])) for k, *vals in rows],
        }
        out.write(report.render_json(payload))
        return EXIT_OK
    cells = [[k] + [ctx.format_fixed(v, args.places) for v in vals] for k, *vals in rows]
    if args.output == "csv":
        out.write("\n".join(",".join(r) for r in [list(header)] + cells) + "\n")
        return EXIT_OK
    widths = [max(len(r[c]) for r in cells + [list(header)]) for c in range(len(header))]
    out.write(f"s = {args.s}: orders of the depth-k stationary processes and their indices (d = s)\n")
    out.write("  ".join(h.rjust(w) for h, w in zip(header, widths)) + "\n")
    out.write("  ".join("-" * w for w in widths) + "\n")
    for r in cells:
        if r[0] == "limit":
            out.write("  ".join("-" * w for w in widths) + "\n")
        out.write("  ".join(v.rjust(w) for v, w in zip(r, widths)) + "\n")
    return EXIT_OK


def cmd_reproduce_table1(args, out) -> int:
    result = table1.run_table1()
    if args.output == "json":
        payload = {
            "checks": [c.__dict__ for c in result.checks],
            "passed": result.passed,
            "traces": {
                name: report.trace_payload(trace, result.ctx, function=table1.FUNCTION, points=list(table1.POINTS))
                for name, trace in result.traces.items()
            },
        }
        out.write(report.render_json(payload))
    else:
        out.write(table1.render(result) + "\n")
    return EXIT_OK if result.passed else EXIT_NUMERIC


# -- argument parsing -------------------------------------------------------------------


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--function", help="f(x), e.g. 'x^2 - exp((1/x) * sin(pi * x^2 / 2)) - 1'")
    p.add_argument("--points", help="comma-separated initial points x_0,x_1,...")
    p.add_argument("--precision", type=int, help=f"working precision in decimal digits (default {DEFAULT_PRECISION})")
    p.add_argument("--tol", help="step and residual tolerance (default 1e-(precision-20))")
    p.add_argument("--max-iter", dest="max_iter", type=int, help="maximum iterations (default 60)")
    p.add_argument("--root-hint", dest="root_hint", help="known root, enables the error column")
    p.add_argument("--output", choices=("table", "csv", "json"))
    p.add_argument("--places", type=int, help="fractional digits in table output (default 10)")
    p.add_argument("--config", help="key=value file with defaults for these flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nonstationary", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run one method")
    p.add_argument("--method", help=f"one of: {', '.join(METHODS)}")
    _add_run_flags(p)

    p = sub.add_parser("compare", help="run several methods side by side")
    p.add_argument("--methods", help="comma-separated method names (default: all)")
    _add_run_flags(p)

    p = sub.add_parser("analyze", help="order-equation roots and efficiency indices")
    p.add_argument("--s", type=int, required=True, help="number of derivatives used, f included")
    p.add_argument("--n-max", dest="n_max", type=int, default=10)
    p.add_argument("--precision", type=int, default=40)
    p.add_argument("--places", type=int, default=10)
    p.add_argument("--output", choices=("table", "csv", "json"), default="table")

    p = sub.add_parser("reproduce-table1", help="recompute and check the published iterate table")
    p.add_argument("--output", choices=("table", "json"), default="table")
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if args.command == "analyze":
            return cmd_analyze(args, out)
        if args.command == "reproduce-table1":
            return cmd_reproduce_table1(args, out)
        opts = resolve_options(args)
        if args.command == "solve":
            return cmd_solve(opts, out)
        return cmd_compare(opts, out)
    except (UsageError, ParseError, PrecisionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (IterationError, DomainError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
