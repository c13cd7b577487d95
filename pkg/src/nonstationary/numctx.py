"""Arbitrary-precision real arithmetic bound to an explicit context.

Every computation in the package goes through a :class:`NumericContext`.
There is no process-wide precision: two contexts with different precision
can be used side by side (and from different threads).  Values are mpmath
``mpf`` numbers created by the context's own mpmath ``MPContext``, so they
carry the precision of the context that produced them.
"""

from __future__ import annotations

import math
from decimal import ROUND_DOWN, ROUND_HALF_EVEN, Decimal
from fractions import Fraction
from typing import Union

import mpmath
from mpmath import libmp
from mpmath.ctx_mp_python import _mpf

__all__ = [
    "DEFAULT_PRECISION",
    "MIN_PRECISION",
    "DivisionByZero",
    "DomainError",
    "NumericContext",
    "PrecisionError",
    "Real",
]

DEFAULT_PRECISION = 120
MIN_PRECISION = 30

# Base class shared by the mpf types of every mpmath context.
Real = _mpf
Number = Union[int, str, Fraction, _mpf]


class DomainError(ArithmeticError):
    """An argument lies outside the real domain of an operation."""


class DivisionByZero(DomainError, ZeroDivisionError):
    pass


class PrecisionError(ValueError):
    pass


class NumericContext:
    """Working precision in significant decimal digits, round-to-nearest.

    >>> ctx = NumericContext(50)
    >>> ctx.format_sci(ctx.div(1, 3), 5)
    '0.33333'
    """

    __slots__ = ("_mp", "_precision_digits")

    def __init__(self, precision_digits: int = DEFAULT_PRECISION):
        if not isinstance(precision_digits, int) or isinstance(precision_digits, bool):
            raise PrecisionError(f"precision must be an integer, got {precision_digits!r}")
        if precision_digits < MIN_PRECISION:
            raise PrecisionError(
                f"precision {precision_digits} is below the supported minimum of {MIN_PRECISION} digits"
            )
        mp = mpmath.MPContext()
        mp.dps = precision_digits
        object.__setattr__(self, "_mp", mp)
        object.__setattr__(self, "_precision_digits", precision_digits)

    def __setattr__(self, name, value):
        raise AttributeError("NumericContext is immutable")

    def __repr__(self) -> str:
        return f"NumericContext(precision_digits={self._precision_digits})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, NumericContext):
            return NotImplemented
        return self._precision_digits == other._precision_digits

    def __hash__(self) -> int:
        return hash(("NumericContext", self._precision_digits))

    @property
    def precision_digits(self) -> int:
        return self._precision_digits

    @property
    def mp(self) -> mpmath.MPContext:
        """The private mpmath context (read-only use only)."""
        return self._mp

    # -- construction -----------------------------------------------------

    def real(self, value: Number) -> Real:
        """Convert ``value`` exactly (then round once) to a context real.

        Decimal strings are parsed by mpmath at full context precision, so
        ``"1.7"`` means the decimal 1.7, not the nearest double.
        """
        if isinstance(value, Fraction):
            if value.denominator == 1:
                return self._mp.mpf(value.numerator)
            return self._mp.mpf(value.numerator) / value.denominator
        if isinstance(value, float):
            if not math.isfinite(value):
                raise DomainError(f"non-finite value {value!r}")
            return self._mp.mpf(value)
        if isinstance(value, str):
            try:
                out = self._mp.mpf(value.strip())
            except (ValueError, TypeError) as exc:
                raise ValueError(f"not a decimal number: {value!r}") from exc
            return self._check(out, "parse")
        if isinstance(value, _mpf):
            return self._check(self._mp.mpf(value), "convert")
        return self._mp.mpf(value)

    def _check(self, value, op: str) -> Real:
        if not isinstance(value, _mpf):
            raise DomainError(f"{op} produced a non-real result")
        if not self._mp.isfinite(value):
            raise DomainError(f"{op} produced a non-finite result")
        return value

    # -- arithmetic -------------------------------------------------------

    def add(self, a: Number, b: Number) -> Real:
        return self._check(self.real(a) + self.real(b), "add")

    def sub(self, a: Number, b: Number) -> Real:
        return self._check(self.real(a) - self.real(b), "sub")

    def mul(self, a: Number, b: Number) -> Real:
        return self._check(self.real(a) * self.real(b), "mul")

    def div(self, a: Number, b: Number) -> Real:
        b = self.real(b)
        if not b:
            raise DivisionByZero("division by zero")
        return self._check(self.real(a) / b, "div")

    def arith(self, a: Number, b: Number, op: str) -> Real:
        try:
            fn = {"add": self.add, "sub": self.sub, "mul": self.mul, "div": self.div}[op]
        except KeyError:
            raise ValueError(f"unknown arithmetic operation {op!r}") from None
        return fn(a, b)

    # -- transcendental functions -----------------------------------------

    def pi(self) -> Real:
        return +self._mp.pi

    def exp(self, x: Number) -> Real:
        return self._check(self._mp.exp(self.real(x)), "exp")

    def sin(self, x: Number) -> Real:
        return self._mp.sin(self.real(x))

    def cos(self, x: Number) -> Real:
        return self._mp.cos(self.real(x))

    def ln(self, x: Number) -> Real:
        x = self.real(x)
        if x <= 0:
            raise DomainError(f"ln of non-positive value {self.format_sci(x, 6)}")
        return self._mp.ln(x)

    def sqrt(self, x: Number) -> Real:
        x = self.real(x)
        if x < 0:
            raise DomainError(f"sqrt of negative value {self.format_sci(x, 6)}")
        return self._mp.sqrt(x)

    def pow(self, base: Number, exponent: Number) -> Real:
        base = self.real(base)
        exponent = self.real(exponent)
        integral = exponent == int(exponent)
        if not base:
            if exponent < 0:
                raise DivisionByZero("zero raised to a negative power")
            return self._mp.mpf(1) if not exponent else self._mp.mpf(0)
        if base < 0 and not integral:
            raise DomainError("negative base raised to a non-integer power")
        if integral and abs(exponent) < 2**63:
            return self._check(self._mp.power(base, int(exponent)), "pow")
        return self._check(self._mp.power(base, exponent), "pow")

    def transcendental(self, x: Number, fn: str, exponent: Number | None = None) -> Real:
        if fn == "pow":
            if exponent is None:
                raise ValueError("pow needs an exponent")
            return self.pow(x, exponent)
        try:
            op = {"exp": self.exp, "sin": self.sin, "cos": self.cos, "ln": self.ln, "sqrt": self.sqrt}[fn]
        except KeyError:
            raise ValueError(f"unknown function {fn!r}") from None
        return op(x)

    def log10(self, x: Number) -> Real:
        return self.ln(x) / self._mp.ln(10)

    # -- helpers ------------------------------------------------------------

    def epsilon(self, slack_digits: int = 0) -> Real:
        """``10**(-precision + slack_digits)``."""
        return self._mp.mpf(10) ** (slack_digits - self._precision_digits)

    def is_flushed(self, x: Real) -> bool:
        """True when ``|x|`` is below ``10**(-4*precision)`` and may print as 0."""
        return abs(x) < self._mp.mpf(10) ** (-4 * self._precision_digits)

    def decimal_string(self, x: Real, digits: int | None = None) -> str:
        """Shortest round-trippable decimal rendering at ``digits`` significant digits."""
        return libmp.to_str(self.real(x)._mpf_, digits or self._precision_digits)

    def format_fixed(self, x: Real, places: int = 10, truncate: bool = False) -> str:
        """Fixed-point rendering at ``places`` fractional digits.

        Round-half-even by default; ``truncate=True`` chops toward zero.
        """
        dec = Decimal(self.decimal_string(x, self._precision_digits))
        rounding = ROUND_DOWN if truncate else ROUND_HALF_EVEN
        out = dec.quantize(Decimal(1).scaleb(-places), rounding=rounding)
        if out.is_zero():
            out = abs(out)
        return f"{out:f}"

    def format_sci(self, x: Real, digits: int = 3) -> str:
        return libmp.to_str(self.real(x)._mpf_, digits)

    def decimal_exponent(self, x: Real) -> int:
        """Exponent ``e`` with ``|x| = m * 10**e`` and ``1 <= m < 10``."""
        x = abs(self.real(x))
        if not x:
            raise DomainError("zero has no decimal exponent")
        return Decimal(self.decimal_string(x, self._precision_digits)).adjusted()
