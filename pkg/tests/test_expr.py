import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonstationary.expr import Binary, Const, ParseError, Pi, Unary, Var, differentiate, evaluate, parse, to_text
from nonstationary.numctx import DomainError, NumericContext

from conftest import EQ21, eq21_mp
from exprgen import corpus

X = Var()


def C(v):
    return Const(Fraction(v))


def test_parse_simple_tree():
    assert parse("x^2 - 1") == Binary("sub", Binary("pow", X, C(2)), C(1))


def test_parse_test_function_tree():
    expected = Binary(
        "sub",
        Binary(
            "sub",
            Binary("pow", X, C(2)),
            Unary(
                "exp",
                Binary(
                    "mul",
                    Binary("div", C(1), X),
                    Unary("sin", Binary("div", Binary("mul", Pi(), Binary("pow", X, C(2))), C(2))),
                ),
            ),
        ),
        C(1),
    )
    assert parse(EQ21) == expected


def test_precedence_and_associativity():
    assert parse("-x^2") == Unary("neg", Binary("pow", X, C(2)))
    assert parse("2^3^2") == Binary("pow", C(2), Binary("pow", C(3), C(2)))
    assert parse("1 - x - 2") == Binary("sub", Binary("sub", C(1), X), C(2))
    assert parse("x / 2 * 3") == Binary("mul", Binary("div", X, C(2)), C(3))
    assert parse("2 ** -1") == Binary("pow", C(2), Unary("neg", C(1)))
    assert parse("log(x)") == Unary("ln", X)
    assert parse("1.25e-1") == C(Fraction(1, 8))


def test_truncated_input_reports_offset():
    with pytest.raises(ParseError) as info:
        parse("x +")
    assert info.value.position == 3
    assert "x" in info.value.expected and "(" in info.value.expected


@pytest.mark.parametrize(
    "source,offset",
    [("", 0), ("x + * 2", 4), ("sin x", 4), ("(x + 1", 6), ("y + 1", 0), ("x $ 2", 2), ("x 2", 2)],
)
def test_parse_errors(source, offset):
    with pytest.raises(ParseError) as info:
        parse(source)
    assert info.value.position == offset


def test_evaluate_examples(ctx):
    assert evaluate(parse("x^2-1"), 2, ctx) == 3
    assert abs(evaluate(parse(EQ21), ctx.sqrt(2), ctx)) < ctx.epsilon(5)
    with pytest.raises(DomainError):
        evaluate(parse("1/x"), 0, ctx)
    with pytest.raises(DomainError):
        evaluate(parse("ln(x)"), -1, ctx)
    with pytest.raises(DomainError):
        evaluate(parse("x^0.5"), -1, ctx)


def test_simple_derivatives():
    assert differentiate(parse("x^2")) == Binary("mul", C(2), X)
    assert differentiate(parse("sin(x)")) == Unary("cos", X)
    assert differentiate(parse("3*x + 1")) == C(3)
    assert differentiate(parse("pi"), 2) == C(0)
    with pytest.raises(ValueError):
        differentiate(parse("x"), 0)


def test_derivative_of_test_function_vs_central_difference(ctx):
    mp = mpmath.MPContext()
    mp.dps = 120
    f = eq21_mp(mp)
    x, h = mp.mpf("1.5"), mp.mpf(10) ** -20
    fd = (f(x + h) - f(x - h)) / (2 * h)
    exact = evaluate(differentiate(parse(EQ21)), ctx.real("1.5"), ctx)
    assert abs(exact - fd) < mp.mpf(10) ** -30 * abs(fd)


def test_variable_exponent_rewrite(ctx):
    # d/dx x^x = x^x (ln x + 1)
    d = differentiate(parse("x^x"))
    x = ctx.real("1.3")
    assert abs(evaluate(d, x, ctx) - x**x * (ctx.ln(x) + 1)) < ctx.epsilon(3)


def test_second_derivative_is_iterated_first(ctx):
    rng = random.Random(7)
    for src in corpus(20, seed=11):
        e = parse(src)
        d2 = differentiate(e, 2)
        d11 = differentiate(differentiate(e, 1), 1)
        for _ in range(5):
            x = ctx.real(rng.uniform(0.5, 2))
            assert evaluate(d2, x, ctx) == evaluate(d11, x, ctx)


# -- printer round trip -------------------------------------------------------

leaves = st.one_of(
    st.just(X),
    st.just(Pi()),
    st.fractions(min_value=-50, max_value=50, max_denominator=12).map(Const),
)


def _extend(children):
    return st.one_of(
        st.builds(Unary, st.sampled_from(["neg", "exp", "sin", "cos"]), children),
        st.builds(Binary, st.sampled_from(["add", "sub", "mul"]), children, children),
        st.builds(lambda a: Binary("div", a, Binary("add", C(3), Unary("sin", X))), children),
        st.builds(lambda a, n: Binary("pow", a, C(n)), children, st.integers(-2, 3)),
    )


trees = st.recursive(leaves, _extend, max_leaves=12)


@settings(max_examples=200, deadline=None)
@given(trees, st.sampled_from(["0.75", "1.3", "1.9"]))
def test_print_parse_roundtrip(tree, xs):
    ctx = NumericContext(40)
    x = ctx.real(xs)
    try:
        expected = evaluate(tree, x, ctx)
    except DomainError:
        return
    assert evaluate(parse(to_text(tree)), x, ctx) == expected


def _five_point(fn, x, h):
    return (fn(x - 2 * h) - 8 * fn(x - h) + 8 * fn(x + h) - fn(x + 2 * h)) / (12 * h)


def test_derivative_property_on_sample(ctx):
    """Smaller twin of the acceptance corpus check, 50 random points on 5 expressions."""
    P = ctx.precision_digits
    h = ctx.real(10) ** (-(P // 6))
    rng = random.Random(3)
    for src in corpus(5, seed=99):
        e = parse(src)
        d = differentiate(e)
        for _ in range(50):
            x = ctx.real(rng.uniform(0.5, 2))
            fd = _five_point(lambda t: evaluate(e, t, ctx), x, h)
            sym = evaluate(d, x, ctx)
            assert abs(fd - sym) <= ctx.real(10) ** (-(P // 3)) * max(1, abs(sym))
