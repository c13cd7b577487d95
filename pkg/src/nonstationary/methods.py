"""Stationary baselines and nonstationary one-point iterations with memory.

All runners share one driver.  Each new iterate ``x_k`` is evaluated with
every piece of information the method needs there (``f`` and possibly some
derivatives); those evaluations are the Horner units ``d_k`` recorded on the
step for ``x_k``.  The driver then asks the method for ``x_{k+1}``.

Stopping rule: ``|x_{k+1} - x_k| < tol_step`` or ``|f(x_{k+1})| < tol_residual``
or ``max_iterations`` new iterates.  A repeated node in a divided-difference
table counts as converged when ``|f(x_k)| < sqrt(tol_residual)`` and as a
stall otherwise.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .divdiff import DividedDifferenceTable, DuplicateNode
from .expr import Expr, differentiate, evaluate, parse, to_text
from .numctx import DomainError, NumericContext, Real

__all__ = [
    "DenominatorVanished",
    "DerivativeVanished",
    "EvaluationFailed",
    "IterationError",
    "IterationTrace",
    "METHODS",
    "MethodConfig",
    "MethodSpec",
    "NoConvergence",
    "Problem",
    "Stalled",
    "Step",
    "Termination",
    "chebyshev_rule",
    "halley_rule",
    "newton_rule",
    "run_chebyshev",
    "run_generalized_secant",
    "run_halley",
    "run_method",
    "run_newton",
    "run_nonstationary_chebyshev",
    "run_nonstationary_generic",
    "run_nonstationary_halley",
    "run_nonstationary_s1",
    "run_secant",
]


class Termination(str, enum.Enum):
    STEP_TOLERANCE = "StepTolerance"
    RESIDUAL_TOLERANCE = "ResidualTolerance"
    MAX_ITERATIONS = "MaxIterations"
    STALLED = "Stalled"


class IterationError(ArithmeticError):
    """Numerical failure during a run; ``trace`` holds the steps recorded so far."""

    def __init__(self, message: str, trace: "IterationTrace | None" = None):
        super().__init__(message)
        self.trace = trace


class DerivativeVanished(IterationError):
    pass


class DenominatorVanished(IterationError):
    pass


class EvaluationFailed(IterationError):
    """f or a derivative is undefined at an iterate the method produced."""


class NoConvergence(IterationError):
    pass


class Stalled(IterationError):
    pass


class _Stall(Exception):
    """Internal signal: the method cannot produce a next iterate."""


@dataclass(frozen=True)
class Step:
    index: int
    x: Real
    residual: Real
    error: Real | None
    horner_units: int


@dataclass
class IterationTrace:
    method: str
    steps: list[Step] = field(default_factory=list)
    termination: Termination | None = None
    message: str = ""
    _n_initial: int = field(default=0, repr=False)

    @property
    def iterates(self) -> list[Real]:
        return [s.x for s in self.steps]

    @property
    def root(self) -> Real:
        return self.steps[-1].x

    @property
    def converged(self) -> bool:
        return self.termination in (Termination.STEP_TOLERANCE, Termination.RESIDUAL_TOLERANCE)

    @property
    def total_horner_units(self) -> int:
        return sum(s.horner_units for s in self.steps)

    @property
    def iterations(self) -> int:
        """Number of iterates produced by the method (initial points excluded)."""
        return max(0, len(self.steps) - self._n_initial)

    def raise_for_status(self) -> "IterationTrace":
        if self.termination is Termination.MAX_ITERATIONS:
            raise NoConvergence(f"{self.method}: no convergence after {self.iterations} iterations", self)
        if self.termination is Termination.STALLED:
            raise Stalled(f"{self.method}: stalled ({self.message})", self)
        return self


class Problem:
    """``f`` with lazily built symbolic derivatives, a context and an optional root hint."""

    def __init__(self, f: Expr | str, ctx: NumericContext | None = None, root_hint=None):
        self.source = f if isinstance(f, str) else to_text(f)
        self.f = parse(f) if isinstance(f, str) else f
        self.ctx = ctx if ctx is not None else NumericContext()
        self.root_hint = None if root_hint is None else self.ctx.real(root_hint)
        self._derivatives: dict[int, Expr] = {0: self.f}

    def derivative(self, order: int) -> Expr:
        if order not in self._derivatives:
            prev = self.derivative(order - 1)
            self._derivatives[order] = differentiate(prev, 1)
        return self._derivatives[order]

    def value(self, order: int, x: Real) -> Real:
        return evaluate(self.derivative(order), x, self.ctx)


@dataclass(frozen=True)
class MethodConfig:
    initial_points: tuple
    tol_step: Real | str | None = None
    tol_residual: Real | str | None = None
    max_iterations: int = 60

    def __post_init__(self):
        object.__setattr__(self, "initial_points", tuple(self.initial_points))
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")


# -- driver -------------------------------------------------------------------


class _Run:
    def __init__(self, name: str, problem: Problem, config: MethodConfig, n_points: int, orders: tuple[int, ...]):
        ctx = problem.ctx
        if len(config.initial_points) != n_points:
            raise ValueError(
                f"{name} needs {n_points} initial point{'s' if n_points > 1 else ''}, "
                f"got {len(config.initial_points)}"
            )
        points = [ctx.real(p) for p in config.initial_points]
        for i in range(len(points)):
            for j in range(i):
                if points[i] == points[j]:
                    raise ValueError(f"initial points x_{j} and x_{i} coincide")
        self.name = name
        self.problem = problem
        self.ctx = ctx
        self.orders = orders
        default_tol = ctx.epsilon(20)
        self.tol_step = default_tol if config.tol_step is None else ctx.real(config.tol_step)
        self.tol_residual = default_tol if config.tol_residual is None else ctx.real(config.tol_residual)
        self.tiny = ctx.epsilon(-ctx.precision_digits)
        self.max_iterations = config.max_iterations
        self.points = points
        self.xs: list[Real] = []
        self.info: list[tuple[Real, ...]] = []
        self.trace = IterationTrace(name, _n_initial=n_points)

    def _observe(self, x: Real) -> None:
        values = tuple(self.problem.value(order, x) for order in self.orders)
        alpha = self.problem.root_hint
        self.xs.append(x)
        self.info.append(values)
        self.trace.steps.append(
            Step(
                index=len(self.trace.steps),
                x=x,
                residual=values[0],
                error=None if alpha is None else abs(x - alpha),
                horner_units=len(values),
            )
        )

    def vanished(self, value: Real) -> bool:
        return abs(value) < self.tiny

    def run(self, step: Callable[["_Run"], Real]) -> IterationTrace:
        trace = self.trace
        try:
            for j, x in enumerate(self.points):
                try:
                    self._observe(x)
                except DomainError as exc:
                    raise ValueError(f"cannot evaluate at initial point x_{j} = {self.ctx.format_sci(x, 20)}: {exc}") from exc
            if abs(self.info[-1][0]) < self.tol_residual:
                trace.termination = Termination.RESIDUAL_TOLERANCE
                return trace
            for _ in range(self.max_iterations):
                try:
                    x_new = step(self)
                except DuplicateNode as exc:
                    trace.message = str(exc)
                    if abs(self.info[-1][0]) < self.ctx.mp.sqrt(self.tol_residual):
                        trace.termination = Termination.STEP_TOLERANCE
                    else:
                        trace.termination = Termination.STALLED
                    return trace
                except _Stall as exc:
                    trace.message = str(exc)
                    trace.termination = Termination.STALLED
                    return trace
                x_old = self.xs[-1]
                try:
                    self._observe(x_new)
                except DomainError as exc:
                    raise EvaluationFailed(
                        f"cannot evaluate at x_{len(self.xs)} = {self.ctx.format_sci(x_new, 20)}: {exc}"
                    ) from exc
                if abs(x_new - x_old) < self.tol_step:
                    trace.termination = Termination.STEP_TOLERANCE
                    return trace
                if abs(self.info[-1][0]) < self.tol_residual:
                    trace.termination = Termination.RESIDUAL_TOLERANCE
                    return trace
            trace.termination = Termination.MAX_ITERATIONS
            return trace
        except IterationError as exc:
            exc.trace = trace
            trace.message = str(exc)
            raise


def _problem_and_config(problem, config):
    if not isinstance(problem, Problem):
        raise TypeError("problem must be a Problem")
    if not isinstance(config, MethodConfig):
        config = MethodConfig(tuple(config))
    return problem, config


# -- one-point update rules -----------------------------------------------------
#
# A rule maps (x_k, (f_k, f'_k, ..., f^(s-1)_k), h) to x_{k+1}, where h stands
# for f^(s)(x_k) or an estimate of it.  ``tiny`` is the vanishing threshold.


def newton_rule(x, values, h, tiny):
    if abs(h) < tiny:
        raise DerivativeVanished("derivative vanished")
    return x - values[0] / h


def halley_rule(x, values, h, tiny):
    f, g = values
    den = 2 * g * g - f * h
    if abs(den) < tiny:
        raise DenominatorVanished("Halley denominator vanished")
    return x - 2 * f * g / den


def chebyshev_rule(x, values, h, tiny):
    f, g = values
    if abs(g) < tiny:
        raise DerivativeVanished("derivative vanished")
    return x - f / g * (1 + f * h / (2 * g * g))


# -- stationary methods -----------------------------------------------------------


def run_newton(problem: Problem, config: MethodConfig) -> IterationTrace:
    """Newton's method, ``x - f/f'``; two Horner units per step."""
    problem, config = _problem_and_config(problem, config)

    def step(run):
        f, g = run.info[-1]
        if run.vanished(g):
            raise DerivativeVanished(f"f' vanished at step {len(run.xs) - 1}")
        return run.xs[-1] - f / g

    return _Run("newton", problem, config, 1, (0, 1)).run(step)


def run_secant(problem: Problem, config: MethodConfig) -> IterationTrace:
    problem, config = _problem_and_config(problem, config)

    def step(run):
        x1, x0 = run.xs[-1], run.xs[-2]
        f1, f0 = run.info[-1][0], run.info[-2][0]
        if x1 == x0:
            raise DuplicateNode(len(run.xs) - 2)
        slope = (f1 - f0) / (x1 - x0)
        if run.vanished(slope):
            raise _Stall("secant slope vanished")
        return x1 - f1 / slope

    return _Run("secant", problem, config, 2, (0,)).run(step)


def run_generalized_secant(problem: Problem, config: MethodConfig) -> IterationTrace:
    """Secant through the last three iterates: Newton step on their quadratic interpolant."""
    problem, config = _problem_and_config(problem, config)

    def step(run):
        table = DividedDifferenceTable.from_points(run.xs[-3:], [v[0] for v in run.info[-3:]])
        slope = table.newton_poly_derivative_at_last()
        if run.vanished(slope):
            raise _Stall("interpolant slope vanished")
        return run.xs[-1] - run.info[-1][0] / slope

    return _Run("generalized-secant", problem, config, 3, (0,)).run(step)


def run_halley(problem: Problem, config: MethodConfig) -> IterationTrace:
    problem, config = _problem_and_config(problem, config)

    def step(run):
        f, g, h = run.info[-1]
        den = 2 * g * g - f * h
        if run.vanished(den):
            raise DenominatorVanished(f"Halley denominator vanished at step {len(run.xs) - 1}")
        return run.xs[-1] - 2 * f * g / den

    return _Run("halley", problem, config, 1, (0, 1, 2)).run(step)


def run_chebyshev(problem: Problem, config: MethodConfig) -> IterationTrace:
    problem, config = _problem_and_config(problem, config)

    def step(run):
        f, g, h = run.info[-1]
        if run.vanished(g):
            raise DerivativeVanished(f"f' vanished at step {len(run.xs) - 1}")
        return run.xs[-1] - f / g * (1 + f * h / (2 * g * g))

    return _Run("chebyshev", problem, config, 1, (0, 1, 2)).run(step)


# -- nonstationary methods ----------------------------------------------------------


class _GrowingTable:
    """Divided differences of one information column over every iterate so far."""

    def __init__(self, column: int):
        self.column = column
        self.table = DividedDifferenceTable()

    def sync(self, run: _Run) -> DividedDifferenceTable:
        while len(self.table) < len(run.xs):
            j = len(self.table)
            self.table = self.table.append_node(run.xs[j], run.info[j][self.column])
        return self.table


def run_nonstationary_s1(problem: Problem, config: MethodConfig) -> IterationTrace:
    """``x_{k+1} = x_k - f_k / G_k`` with ``G_k`` the slope at ``x_k`` of the
    polynomial interpolating f at all iterates ``x_0..x_k``.

    The first step is the secant step; only ``f_k`` is new at each step.
    """
    problem, config = _problem_and_config(problem, config)
    grow = _GrowingTable(0)

    def step(run):
        table = grow.sync(run)
        g = table.newton_poly_derivative_at_last()
        if run.vanished(g):
            raise _Stall("interpolant slope vanished")
        return run.xs[-1] - run.info[-1][0] / g

    return _Run("nonstat-s1", problem, config, 2, (0,)).run(step)


def run_nonstationary_halley(problem: Problem, config: MethodConfig) -> IterationTrace:
    """Halley's step with ``f''(x_k)`` replaced by the slope at ``x_k`` of the
    polynomial interpolating ``f'`` at all iterates.  Needs three starting points;
    ``f`` and ``f'`` are the only evaluations per step.
    """
    problem, config = _problem_and_config(problem, config)
    grow = _GrowingTable(1)

    def step(run):
        table = grow.sync(run)
        big_g = table.newton_poly_derivative_at_last()
        f, g = run.info[-1]
        den = 2 * g * g - f * big_g
        if run.vanished(den):
            raise DenominatorVanished(f"denominator vanished at step {len(run.xs) - 1}")
        return run.xs[-1] - 2 * f * g / den

    return _Run("nonstat-halley", problem, config, 3, (0, 1)).run(step)


def run_nonstationary_chebyshev(problem: Problem, config: MethodConfig) -> IterationTrace:
    problem, config = _problem_and_config(problem, config)
    grow = _GrowingTable(1)

    def step(run):
        table = grow.sync(run)
        big_g = table.newton_poly_derivative_at_last()
        f, g = run.info[-1]
        if run.vanished(g):
            raise DerivativeVanished(f"f' vanished at step {len(run.xs) - 1}")
        return run.xs[-1] - f / g * (1 + f * big_g / (2 * g * g))

    return _Run("nonstat-chebyshev", problem, config, 3, (0, 1)).run(step)


def run_nonstationary_generic(
    problem: Problem,
    config: MethodConfig,
    s: int,
    base_update: Callable[[Real, Sequence[Real], Real, Real], Real],
    name: str | None = None,
) -> IterationTrace:
    """Turn a one-point rule of order ``s+1`` into an ``s``-nonstationary process.

    ``base_update(x, (f, f', ..., f^(s-1)), h, tiny)`` is the memoryless rule
    with ``h`` in place of ``f^(s)(x)``.  Here ``h`` is the slope at ``x_k`` of
    the polynomial interpolating ``f^(s-1)`` at all iterates, so each step
    costs ``s`` evaluations.  Requires ``s + 1`` starting points.
    """
    if not isinstance(s, int) or s < 1:
        raise ValueError(f"s must be a positive integer, got {s!r}")
    problem, config = _problem_and_config(problem, config)
    grow = _GrowingTable(s - 1)

    def step(run):
        table = grow.sync(run)
        h = table.newton_poly_derivative_at_last()
        return base_update(run.xs[-1], run.info[-1], h, run.tiny)

    run = _Run(name or f"nonstat-generic-s{s}", problem, config, s + 1, tuple(range(s)))
    return run.run(step)


# -- registry -----------------------------------------------------------------------


@dataclass(frozen=True)
class MethodSpec:
    name: str
    runner: Callable[[Problem, MethodConfig], IterationTrace]
    n_points: int
    horner_units: int
    # Either an exact order or (s, n) naming the order-equation root.
    order: int | tuple[int, int]


METHODS: dict[str, MethodSpec] = {
    spec.name: spec
    for spec in (
        MethodSpec("newton", run_newton, 1, 2, 2),
        MethodSpec("secant", run_secant, 2, 1, (1, 1)),
        MethodSpec("generalized-secant", run_generalized_secant, 3, 1, (1, 2)),
        MethodSpec("nonstat-s1", run_nonstationary_s1, 2, 1, 2),
        MethodSpec("halley", run_halley, 1, 3, 3),
        MethodSpec("nonstat-halley", run_nonstationary_halley, 3, 2, 3),
        MethodSpec("chebyshev", run_chebyshev, 1, 3, 3),
        MethodSpec("nonstat-chebyshev", run_nonstationary_chebyshev, 3, 2, 3),
    )
}


def run_method(name: str, problem: Problem, config: MethodConfig) -> IterationTrace:
    try:
        spec = METHODS[name]
    except KeyError:
        raise ValueError(f"unknown method {name!r}; choose from {', '.join(METHODS)}") from None
    return spec.runner(problem, config)
