"""Convergence orders and efficiency indices.

* the order equation ``t**(n+1) - s*(1 + t + ... + t**n) = 0`` for one-point
  processes reusing information at ``n`` old points, solved by bisection on
  its guaranteed bracket ``(s, s+1)``;
* the informational, computational and local efficiency indices
  ``p/d``, ``p**(1/d)`` and ``log10(p)/d``;
* empirical orders from traces via Wall's ratio of ``-log|e_n|``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .methods import METHODS, IterationTrace, MethodSpec
from .numctx import NumericContext, Real

__all__ = [
    "EfficiencyReport",
    "InsufficientData",
    "OrderEquation",
    "asymptotic_constant",
    "efficiency_indices",
    "empirical_order",
    "kung_traub_comparison",
    "order_sequence",
    "solve_order_equation",
    "theoretical_order",
]

_DEFAULT_CTX = NumericContext(40)


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class OrderEquation:
    s: int
    n: int

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("s must be at least 1")
        if self.n < 1:
            # n = 0 (no memory) is outside the equation's range of validity.
            raise ValueError("memory depth n must be at least 1")

    def __call__(self, t: Real) -> Real:
        # t^(n+1) - s * sum_{j<=n} t^j, both parts by Horner.
        geometric = 0
        for _ in range(self.n + 1):
            geometric = geometric * t + 1
        return t ** (self.n + 1) - self.s * geometric

    def bracket(self, ctx: NumericContext = _DEFAULT_CTX) -> tuple[Real, Real]:
        lo, hi = ctx.real(self.s), ctx.real(self.s + 1)
        if not (self(lo) < 0 < self(hi)):
            raise ArithmeticError(f"no sign change on [{self.s}, {self.s + 1}]")
        return lo, hi


def solve_order_equation(eq: OrderEquation, tol: Real | str = "1e-15", ctx: NumericContext = _DEFAULT_CTX) -> Real:
    """Root of the order equation in ``(s, s+1)``, bisected to width ``tol``."""
    tol = ctx.real(tol)
    lo, hi = eq.bracket(ctx)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if eq(mid) < 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def order_sequence(s: int, n_max: int, tol: Real | str = "1e-15", ctx: NumericContext = _DEFAULT_CTX) -> list[Real]:
    """Orders ``[r_1, ..., r_{n_max}]`` of the depth-k stationary processes."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    return [solve_order_equation(OrderEquation(s, k), tol, ctx) for k in range(1, n_max + 1)]


@dataclass(frozen=True)
class EfficiencyReport:
    p: Real
    d: int
    I1: Real
    I2: Real
    I3: Real


def efficiency_indices(p, d: int, ctx: NumericContext = _DEFAULT_CTX) -> EfficiencyReport:
    p = ctx.real(p)
    if not p > 1:
        raise ValueError("order p must exceed 1")
    if d < 1:
        raise ValueError("Horner units d must be at least 1")
    i2 = ctx.pow(p, ctx.div(1, d))
    return EfficiencyReport(p=p, d=d, I1=p / d, I2=i2, I3=ctx.log10(i2))


def kung_traub_comparison(n_evals: int, ctx: NumericContext = _DEFAULT_CTX) -> Real:
    """Computational efficiency ``2**((n-1)/n)`` of an optimal n-evaluation multipoint method.

    Always below 2, the index of the one-derivative nonstationary process.
    """
    if n_evals < 1:
        raise ValueError("n_evals must be at least 1")
    return ctx.pow(2, ctx.div(n_evals - 1, n_evals))


def theoretical_order(spec: MethodSpec | str, ctx: NumericContext = _DEFAULT_CTX) -> Real:
    if isinstance(spec, str):
        spec = METHODS[spec]
    if isinstance(spec.order, tuple):
        return solve_order_equation(OrderEquation(*spec.order), ctx=ctx)
    return ctx.real(spec.order)


# -- empirical order -----------------------------------------------------------------


def _error_sequence(trace: IterationTrace, ctx: NumericContext, proxy: bool) -> list[Real]:
    if not proxy:
        return [s.error for s in trace.steps]
    xs = trace.iterates
    return [abs(xs[i + 1] - xs[i]) for i in range(len(xs) - 1)]


def empirical_order(
    trace: IterationTrace,
    ctx: NumericContext | None = None,
    proxy: bool | None = None,
    floor: Real | None = None,
) -> list[Real]:
    """Wall ratios ``p_{n+1}/p_n`` with ``p_n = -log|e_n|``.

    Errors come from the trace's root hint; without one (or with
    ``proxy=True``) successive step lengths stand in for them.  Errors below
    ``floor`` (default ``10**(-precision+10)``) are indistinguishable from
    noise and are skipped together with exact zeros, as are errors of size one
    or larger.  A root hint known to fewer digits than the working precision
    calls for a higher floor.
    """
    if not trace.steps:
        raise InsufficientData("empty trace")
    if ctx is None:
        ctx = NumericContext(max(30, trace.steps[0].x.context.dps))
    if proxy is None:
        proxy = trace.steps[0].error is None
    if not proxy and trace.steps[0].error is None:
        raise InsufficientData("trace has no error column; use proxy=True")
    floor = ctx.epsilon(10) if floor is None else max(ctx.real(floor), ctx.epsilon(10))
    logs = [-ctx.ln(e) for e in _error_sequence(trace, ctx, proxy) if floor <= e < 1]
    if len(logs) < 4:
        raise InsufficientData(f"need at least 4 usable errors, got {len(logs)}")
    return [logs[i + 1] / logs[i] for i in range(len(logs) - 1)]


def asymptotic_constant(trace: IterationTrace, p, ctx: NumericContext | None = None) -> Real:
    """Indicative ``|e_{n+1}| / |e_n|**p`` at the last pair of usable errors."""
    if ctx is None:
        ctx = NumericContext(max(30, trace.steps[0].x.context.dps))
    floor = ctx.epsilon(10)
    proxy = trace.steps[0].error is None
    errors = [e for e in _error_sequence(trace, ctx, proxy) if floor <= e < 1]
    if len(errors) < 2:
        raise InsufficientData("need two usable errors")
    return errors[-1] / ctx.pow(errors[-2], p)
