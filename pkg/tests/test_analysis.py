import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonstationary.analysis import (
    InsufficientData,
    OrderEquation,
    asymptotic_constant,
    efficiency_indices,
    empirical_order,
    kung_traub_comparison,
    order_sequence,
    solve_order_equation,
    theoretical_order,
)
from nonstationary.methods import IterationTrace, MethodConfig, Step, run_method
from nonstationary.numctx import NumericContext

CTX = NumericContext(60)


def polyroot(s, n):
    """Independent oracle: mpmath's polynomial root finder on t^{n+1} - s(t^n + ... + 1)."""
    mp = mpmath.MPContext()
    mp.dps = 50
    coeffs = [1] + [-s] * (n + 1)
    roots = mp.polyroots(coeffs, maxsteps=200, extraprec=200)
    return max(r.real for r in roots if abs(r.imag) < mp.mpf(10) ** -30)


def test_golden_ratio():
    r = solve_order_equation(OrderEquation(1, 1), ctx=CTX)
    assert abs(r - (1 + CTX.sqrt(5)) / 2) < 1e-8


def test_tribonacci_like_root():
    r = solve_order_equation(OrderEquation(1, 2), ctx=CTX)
    assert abs(r - CTX.real("1.84")) < 1e-3
    assert abs(r - polyroot(1, 2)) < 1e-14


def test_long_memory_approaches_s_plus_one():
    assert abs(solve_order_equation(OrderEquation(2, 40), ctx=CTX) - 3) < 1e-6


@pytest.mark.parametrize("s,n", [(1, 3), (2, 1), (2, 5), (3, 2), (5, 7)])
def test_against_polynomial_roots(s, n):
    assert abs(solve_order_equation(OrderEquation(s, n), ctx=CTX) - polyroot(s, n)) < 1e-14


def test_sequence_s1():
    seq = order_sequence(1, 3, ctx=CTX)
    assert [CTX.format_fixed(r, 3) for r in seq] == ["1.618", "1.839", "1.928"]


@pytest.mark.parametrize("s", [1, 2, 3, 4])
def test_sequence_bounds_and_fixed_point(s):
    tol = CTX.real("1e-30")
    seq = order_sequence(s, 12, tol, CTX)
    for k, r in enumerate(seq, start=1):
        assert s < r < s + 1
        assert abs(r - (s + 1 - s / r ** (k + 1))) < 10 * tol * (s + 1)
    assert all(a < b for a, b in zip(seq, seq[1:]))


def test_residual_small_relative_to_slope():
    tol = CTX.real("1e-20")
    eq = OrderEquation(3, 4)
    r = solve_order_equation(eq, tol, CTX)
    lo, hi = eq.bracket(CTX)
    slope = (eq(hi) - eq(lo)) / (hi - lo)
    assert abs(eq(r)) < 10 * tol * abs(slope)


def test_invalid_equations():
    with pytest.raises(ValueError):
        OrderEquation(1, 0)
    with pytest.raises(ValueError):
        OrderEquation(0, 2)
    with pytest.raises(ValueError):
        order_sequence(1, 0)


def test_efficiency_examples():
    halley = efficiency_indices(3, 3, CTX)
    assert halley.I1 == 1
    assert abs(halley.I2 - CTX.pow(3, CTX.div(1, 3))) < CTX.epsilon(2)
    assert abs(halley.I3 - CTX.log10(3) / 3) < CTX.epsilon(2)
    nonstat = efficiency_indices(3, 2, CTX)
    assert nonstat.I1 == CTX.real("1.5")
    assert abs(nonstat.I2 - CTX.sqrt(3)) < CTX.epsilon(2)
    s1 = efficiency_indices(2, 1, CTX)
    assert s1.I1 == s1.I2 == 2
    assert abs(s1.I3 - CTX.real("0.301")) < 5e-4
    with pytest.raises(ValueError):
        efficiency_indices(1, 2, CTX)
    with pytest.raises(ValueError):
        efficiency_indices(2, 0, CTX)


@settings(max_examples=50, deadline=None)
@given(st.fractions(min_value=1.01, max_value=10), st.integers(1, 6))
def test_local_efficiency_is_log_of_computational(p, d):
    r = efficiency_indices(p, d, CTX)
    assert r.I3 == CTX.log10(r.I2)
    assert r.I1 == r.p / d


def test_kung_traub():
    assert abs(kung_traub_comparison(2, CTX) - CTX.sqrt(2)) < CTX.epsilon(2)
    assert CTX.format_fixed(kung_traub_comparison(4, CTX), 5) == "1.68179"
    assert all(kung_traub_comparison(n, CTX) < 2 for n in range(1, 65))
    with pytest.raises(ValueError):
        kung_traub_comparison(0)


@pytest.mark.parametrize("s", [1, 2, 3])
def test_memory_never_beats_nonstationary_limit(s):
    for k, r in enumerate(order_sequence(s, 15, ctx=CTX), start=1):
        rep = efficiency_indices(r, s, CTX)
        assert rep.I1 < CTX.div(s + 1, s)
        assert rep.I2 < CTX.pow(s + 1, CTX.div(1, s))


def test_theoretical_orders():
    assert theoretical_order("halley", CTX) == 3
    assert abs(theoretical_order("secant", CTX) - (1 + CTX.sqrt(5)) / 2) < 1e-14


# -- empirical order --------------------------------------------------------------


def synthetic_trace(errors, with_error=True):
    ctx = NumericContext(200)
    steps = [
        Step(i, 1 + ctx.real(e), ctx.real(e), ctx.real(e) if with_error else None, 1) for i, e in enumerate(errors)
    ]
    return IterationTrace("synthetic", steps)


def test_doubling_errors_give_ratio_two():
    trace = synthetic_trace([f"1e-{2**n}" for n in range(1, 7)])
    ratios = empirical_order(trace)
    assert len(ratios) == 5
    assert all(abs(r - 2) < 1e-40 for r in ratios)


def test_proxy_mode_uses_step_lengths():
    # Iterates 1 + 10^(-3^n): step lengths shrink with order 3.
    trace = synthetic_trace([f"1e-{3**n}" for n in range(1, 6)], with_error=False)
    ratios = empirical_order(trace)
    assert abs(ratios[-1] - 3) < 1e-3


def test_noise_floor_and_zeros_skipped():
    trace = synthetic_trace(["1e-2", "1e-4", "1e-8", "1e-16", "1e-32", "1e-195", "0"])
    assert len(empirical_order(trace)) == 4


def test_insufficient_data():
    with pytest.raises(InsufficientData):
        empirical_order(synthetic_trace(["1e-2", "1e-4", "1e-8"]))
    with pytest.raises(InsufficientData):
        empirical_order(IterationTrace("empty"))
    with pytest.raises(InsufficientData):
        empirical_order(synthetic_trace(["1e-2"] * 5, with_error=False), proxy=False)


def test_asymptotic_constant(ctx, eq21):
    trace = run_method("newton", eq21, MethodConfig(["1.5"]))
    c = asymptotic_constant(trace, 2)
    f1, f2 = eq21.value(1, eq21.root_hint), eq21.value(2, eq21.root_hint)
    assert abs(c - abs(f2 / (2 * f1))) < 1e-3


def test_custom_floor_drops_untrusted_errors():
    trace = synthetic_trace(["1e-2", "1e-4", "1e-8", "1e-16", "1e-21", "1e-21"])
    assert len(empirical_order(trace)) == 5
    assert len(empirical_order(trace, floor="1e-18")) == 3
