"""Rendering of traces as aligned text, CSV and JSON, and reading them back."""

from __future__ import annotations

import csv
import io
import json

from .methods import METHODS, IterationTrace, Step, Termination
from .numctx import NumericContext, Real

CSV_FIELDS = ("i", "x", "abs_error", "residual", "horner_units")


def format_small(ctx: NumericContext, value: Real | None, places: int = 10) -> str:
    """Fixed ``places`` decimals; scientific below ``10**-places``; ``0`` once flushed."""
    if value is None:
        return "-"
    if not value or ctx.is_flushed(value):
        return "0"
    if abs(value) < ctx.real(10) ** (-places):
        return ctx.format_sci(value, 3)
    return ctx.format_fixed(value, places)


def format_iterate(ctx: NumericContext, value: Real, places: int = 10) -> str:
    """Iterates are truncated, not rounded, so a printed digit is never ahead of the value."""
    return ctx.format_fixed(value, places, truncate=True)


def _full(ctx: NumericContext, value: Real | None) -> str:
    return "" if value is None else ctx.decimal_string(value)


def step_rows(trace: IterationTrace, ctx: NumericContext) -> list[dict[str, str | int]]:
    return [
        {
            "i": step.index,
            "x": _full(ctx, step.x),
            "abs_error": _full(ctx, step.error),
            "residual": _full(ctx, step.residual),
            "horner_units": step.horner_units,
        }
        for step in trace.steps
    ]


def render_table(trace: IterationTrace, ctx: NumericContext, places: int = 10) -> str:
    has_error = any(step.error is not None for step in trace.steps)
    header = ["i", "x_i"] + (["|e_i|"] if has_error else []) + ["f(x_i)", "d_i", "sum d"]
    rows = []
    total = 0
    for step in trace.steps:
        total += step.horner_units
        row = [str(step.index), format_iterate(ctx, step.x, places)]
        if has_error:
            row.append(format_small(ctx, step.error, places))
        row += [format_small(ctx, step.residual, places), str(step.horner_units), str(total)]
        rows.append(row)
    widths = [max(len(r[c]) for r in rows + [header]) for c in range(len(header))]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in rows]
    return "\n".join(lines)


def render_csv(trace: IterationTrace, ctx: NumericContext) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(step_rows(trace, ctx))
    return buf.getvalue()


def trace_payload(
    trace: IterationTrace,
    ctx: NumericContext,
    *,
    function: str,
    points: list[str],
    empirical: list[Real] | None = None,
    indices=None,
) -> dict:
    payload = {
        "method": trace.method,
        "function": function,
        "points": list(points),
        "precision": ctx.precision_digits,
        "steps": step_rows(trace, ctx),
        "termination": trace.termination.value if trace.termination else None,
        "empirical_order": [ctx.decimal_string(r, 20) for r in (empirical or [])],
        "indices": None,
    }
    if indices is not None:
        payload["indices"] = {
            "p": ctx.decimal_string(indices.p, 20),
            "d": indices.d,
            "I1": ctx.decimal_string(indices.I1, 20),
            "I2": ctx.decimal_string(indices.I2, 20),
            "I3": ctx.decimal_string(indices.I3, 20),
        }
    return payload


def render_json(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def trace_from_payload(payload: dict) -> tuple[IterationTrace, NumericContext]:
    """Rebuild a trace (at the recorded precision) from a parsed JSON payload."""
    ctx = NumericContext(int(payload["precision"]))
    method = payload["method"]
    n_initial = METHODS[method].n_points if method in METHODS else 0
    trace = IterationTrace(method, _n_initial=n_initial)
    trace.steps.extend(_steps_from_rows(payload["steps"], ctx))
    if payload.get("termination"):
        trace.termination = Termination(payload["termination"])
    return trace, ctx


def trace_from_csv(text: str, ctx: NumericContext, method: str = "unknown") -> IterationTrace:
    trace = IterationTrace(method)
    trace.steps.extend(_steps_from_rows(csv.DictReader(io.StringIO(text)), ctx))
    return trace


def _steps_from_rows(rows, ctx: NumericContext) -> list[Step]:
    return [
        Step(
            index=int(row["i"]),
            x=ctx.real(row["x"]),
            residual=ctx.real(row["residual"]),
            error=ctx.real(row["abs_error"]) if row["abs_error"] not in ("", None) else None,
            horner_units=int(row["horner_units"]),
        )
        for row in rows
    ]
