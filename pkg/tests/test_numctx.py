from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonstationary.numctx import DivisionByZero, DomainError, NumericContext, PrecisionError


@pytest.fixture(scope="module")
def c50():
    return NumericContext(50)


def test_one_third_has_fifty_threes(c50):
    assert c50.decimal_string(c50.arith(1, 3, "div"), 50) == "0." + "3" * 50


def test_two_minus_two(c50):
    assert c50.arith(2, 2, "sub") == 0


def test_sqrt2_squared_matches_two(c50):
    r = c50.sqrt(2)
    assert abs(c50.arith(r, r, "mul") - 2) < c50.epsilon(2)


def test_division_by_zero(c50):
    with pytest.raises(DivisionByZero):
        c50.div(1, 0)
    with pytest.raises(ZeroDivisionError):
        c50.arith(1, 0, "div")


def test_transcendental_examples(c50):
    assert abs(c50.sin(c50.pi() / 2) - 1) < c50.epsilon(2)
    assert c50.exp(0) == 1
    assert c50.format_fixed(c50.sqrt(2), 10) == "1.4142135624"
    assert c50.format_fixed(c50.pi(), 9) == "3.141592654"
    assert abs(c50.sin(c50.pi())) < c50.epsilon(2)
    assert abs(c50.cos(c50.pi()) + 1) < c50.epsilon(2)


@pytest.mark.parametrize("fn,arg", [("ln", 0), ("ln", -1), ("sqrt", "-0.5")])
def test_domain_errors(c50, fn, arg):
    with pytest.raises(DomainError):
        c50.transcendental(arg, fn)


def test_pow(c50):
    assert c50.transcendental(2, "pow", 10) == 1024
    assert abs(c50.pow(2, "0.5") - c50.sqrt(2)) < c50.epsilon(2)
    with pytest.raises(DomainError):
        c50.pow(-2, "0.5")
    with pytest.raises(DivisionByZero):
        c50.pow(0, -1)


def test_precision_floor():
    with pytest.raises(PrecisionError):
        NumericContext(29)
    assert NumericContext(30).precision_digits == 30


def test_contexts_are_independent():
    lo, hi = NumericContext(30), NumericContext(200)
    third_lo, third_hi = lo.div(1, 3), hi.div(1, 3)
    assert abs(third_lo - hi.real(1) / 3) > hi.epsilon(150)
    assert abs(third_hi - hi.real(1) / 3) < hi.epsilon(1)
    with pytest.raises(AttributeError):
        lo.precision_digits = 40


def test_decimal_strings_are_exact(c50):
    assert c50.real("1.7") - c50.real(Fraction(17, 10)) == 0
    assert c50.real("1.7") != c50.real(1.7)


def test_format_fixed_rounding(c50):
    assert c50.format_fixed(c50.real("0.00000000005"), 10) == "0.0000000000"
    assert c50.format_fixed(c50.real("0.00000000015"), 10) == "0.0000000002"
    assert c50.format_fixed(c50.real("1.41435817229378"), 10, truncate=True) == "1.4143581722"
    assert c50.decimal_exponent(c50.real("2.98e-62")) == -62


rationals = st.fractions(max_denominator=2**20).filter(lambda q: abs(q) < 2**40)


@given(rationals, rationals)
def test_exact_dyadic_roundtrip(c50, p, q):
    # Fractions with power-of-two denominators are exactly representable.
    a = c50.real(Fraction(p.numerator, 2 ** 12))
    b = c50.real(Fraction(q.numerator, 2 ** 14))
    assert c50.sub(c50.add(a, b), b) == a
    assert c50.mul(a, 4) / 4 == a


@settings(max_examples=100)
@given(st.floats(min_value=-10, max_value=10, allow_nan=False))
def test_pythagorean_identity(c50, x):
    s, c = c50.sin(x), c50.cos(x)
    assert abs(s * s + c * c - 1) < c50.epsilon(3)


@settings(max_examples=40)
@given(st.floats(min_value=0.01, max_value=20), st.sampled_from(["exp", "sin", "ln", "sqrt", "cos"]))
def test_refinement_keeps_leading_digits(x, fn):
    p = 40
    lo, hi = NumericContext(p), NumericContext(2 * p)
    a = lo.transcendental(lo.real(x), fn)
    b = hi.transcendental(hi.real(x), fn)
    scale = max(abs(b), hi.real(1))
    assert abs(hi.real(a) - b) <= scale * hi.real(10) ** (-(p - 5))
