"""Expression trees for f(x): parsing, evaluation, printing and symbolic derivatives.

Grammar (lowest to highest precedence)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | "+" unary | power
    power   := atom (("^" | "**") unary)?          # right associative
    atom    := NUMBER | "x" | "pi" | FUNC "(" expr ")" | "(" expr ")"
    FUNC    := exp | sin | cos | ln | log | sqrt

``-x^2`` parses as ``-(x^2)`` and ``2^-1`` is accepted.  Numeric literals are
decimal strings and are kept as exact rationals until evaluation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .numctx import DivisionByZero, DomainError, NumericContext, Real

__all__ = [
    "Binary",
    "Const",
    "Expr",
    "ParseError",
    "Pi",
    "Unary",
    "Var",
    "differentiate",
    "evaluate",
    "parse",
    "to_text",
]

UNARY_FUNCS = ("neg", "exp", "sin", "cos", "ln", "sqrt")
BINARY_OPS = ("add", "sub", "mul", "div", "pow")


class ParseError(ValueError):
    def __init__(self, message: str, position: int, expected: tuple[str, ...] = ()):
        self.position = position
        self.expected = tuple(expected)
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at offset {position}{detail}")


# -- nodes --------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: Fraction

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Var:
    def __str__(self):
        return "x"


@dataclass(frozen=True)
class Pi:
    def __str__(self):
        return "pi"


@dataclass(frozen=True)
class Unary:
    fn: str
    arg: "Expr"

    def __post_init__(self):
        if self.fn not in UNARY_FUNCS:
            raise ValueError(f"unknown function {self.fn!r}")

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ValueError(f"unknown operator {self.op!r}")

    def __str__(self):
        return to_text(self)


Expr = Union[Const, Var, Pi, Unary, Binary]

X = Var()
ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


# -- tokenizer / parser -------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*/^()])
    """,
    re.VERBOSE,
)

_FUNC_NAMES = {"exp": "exp", "sin": "sin", "cos": "cos", "ln": "ln", "log": "ln", "sqrt": "sqrt"}
_ATOM_START = ("number", "x", "pi", "(", *sorted(_FUNC_NAMES))


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", pos, _ATOM_START)
        kind = m.lastgroup
        if kind != "ws":
            text = m.group()
            tokens.append(_Token("op" if text == "**" else kind, "^" if text == "**" else text, pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def _accept(self, *texts: str) -> _Token | None:
        tok = self.tok
        if tok.kind == "op" and tok.text in texts:
            self.i += 1
            return tok
        return None

    def _fail(self, expected):
        tok = self.tok
        what = "end of input" if tok.kind == "end" else f"token {tok.text!r}"
        raise ParseError(f"unexpected {what}", tok.pos, expected)

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            self._fail(("+", "-", "*", "/", "^", "end of input"))
        return node

    def expr(self) -> Expr:
        node = self.term()
        while (tok := self._accept("+", "-")) is not None:
            node = Binary("add" if tok.text == "+" else "sub", node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while (tok := self._accept("*", "/")) is not None:
            node = Binary("mul" if tok.text == "*" else "div", node, self.unary())
        return node

    def unary(self) -> Expr:
        if self._accept("-"):
            return Unary("neg", self.unary())
        if self._accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self._accept("^"):
            return Binary("pow", base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "number":
            self.i += 1
            return Const(Fraction(tok.text))
        if tok.kind == "name":
            self.i += 1
            if tok.text == "x":
                return X
            if tok.text == "pi":
                return Pi()
            if tok.text in _FUNC_NAMES:
                if not self._accept("("):
                    self._fail(("(",))
                arg = self.expr()
                if not self._accept(")"):
                    self._fail((")",))
                return Unary(_FUNC_NAMES[tok.text], arg)
            raise ParseError(f"unknown identifier {tok.text!r}", tok.pos, _ATOM_START)
        if self._accept("("):
            node = self.expr()
            if not self._accept(")"):
                self._fail((")",))
            return node
        self._fail(_ATOM_START)


def parse(source: str) -> Expr:
    """Parse ``source`` into an expression tree in the single variable ``x``.

    Raises :class:`ParseError` carrying the offending offset and the set of
    tokens that would have been accepted there.
    """
    if not source or not source.strip():
        raise ParseError("empty expression", 0, _ATOM_START)
    return _Parser(source).parse()


# -- printing -----------------------------------------------------------------

_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}
_SYMBOL = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}


def _const_text(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator) if value >= 0 else f"({value.numerator})"
    return f"({value.numerator}/{value.denominator})"


def _prec(e: Expr) -> int:
    if isinstance(e, Binary):
        return _PREC[e.op]
    if isinstance(e, Unary) and e.fn == "neg":
        return _PREC["neg"]
    return 5


def to_text(e: Expr) -> str:
    """Render ``e`` in the parser's grammar; ``parse(to_text(e))`` evaluates identically."""
    if isinstance(e, Const):
        return _const_text(e.value)
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Pi):
        return "pi"
    if isinstance(e, Unary):
        if e.fn == "neg":
            inner = to_text(e.arg)
            return f"-{inner}" if _prec(e.arg) > _PREC["neg"] else f"-({inner})"
        return f"{e.fn}({to_text(e.arg)})"
    p = _PREC[e.op]
    left, right = to_text(e.left), to_text(e.right)
    if e.op == "pow":
        # Base needs parens unless atomic; exponent may be a bare unary/pow.
        if _prec(e.left) <= p:
            left = f"({left})"
        if _prec(e.right) < _PREC["neg"]:
            right = f"({right})"
    else:
        if _prec(e.left) < p:
            left = f"({left})"
        if _prec(e.right) < p or (_prec(e.right) == p and e.op in ("sub", "div", "add", "mul")):
            right = f"({right})"
    return f"{left} {_SYMBOL[e.op]} {right}"


# -- evaluation ---------------------------------------------------------------


def evaluate(e: Expr, x: Real, ctx: NumericContext) -> Real:
    """Value of ``e`` at ``x`` under ``ctx``; raises DomainError off the real domain."""
    mp = ctx.mp
    x = ctx.real(x)
    pi = None

    def ev(node):
        nonlocal pi
        if isinstance(node, Var):
            return x
        if isinstance(node, Const):
            v = node.value
            return mp.mpf(v.numerator) if v.denominator == 1 else mp.mpf(v.numerator) / v.denominator
        if isinstance(node, Pi):
            if pi is None:
                pi = +mp.pi
            return pi
        if isinstance(node, Unary):
            a = ev(node.arg)
            fn = node.fn
            if fn == "neg":
                return -a
            if fn == "exp":
                return ctx.exp(a)
            if fn == "sin":
                return mp.sin(a)
            if fn == "cos":
                return mp.cos(a)
            if fn == "ln":
                return ctx.ln(a)
            return ctx.sqrt(a)
        op = node.op
        if op == "pow" and isinstance(node.right, Const) and node.right.value.denominator == 1:
            a = ev(node.left)
            n = node.right.value.numerator
            if not a and n < 0:
                raise DivisionByZero("zero raised to a negative power")
            return mp.power(a, n)
        a = ev(node.left)
        b = ev(node.right)
        if op == "add":
            return a + b
        if op == "sub":
            return a - b
        if op == "mul":
            return a * b
        if op == "div":
            if not b:
                raise DivisionByZero("division by zero")
            return a / b
        return ctx.pow(a, b)

    value = ev(e)
    if not mp.isfinite(value):
        raise DomainError("expression evaluated to a non-finite value")
    return value


# -- simplifying constructors -------------------------------------------------


def _is_const(e: Expr, value=None) -> bool:
    return isinstance(e, Const) and (value is None or e.value == value)


def _neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Unary) and a.fn == "neg":
        return a.arg
    return Unary("neg", a)


def _add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    return Binary("add", a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if _is_const(b, 0):
        return a
    if _is_const(a, 0):
        return _neg(b)
    return Binary("sub", a, b)


def _mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if _is_const(a, 0) or _is_const(b, 0):
        return ZERO
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    if _is_const(a, -1):
        return _neg(b)
    if _is_const(b, -1):
        return _neg(a)
    return Binary("mul", a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0:
        return Const(a.value / b.value)
    if _is_const(a, 0) and not _is_const(b, 0):
        return ZERO
    if _is_const(b, 1):
        return a
    return Binary("div", a, b)


def _pow(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 0):
        return ONE
    if _is_const(b, 1):
        return a
    if isinstance(a, Const) and isinstance(b, Const) and b.value.denominator == 1:
        if a.value != 0 or b.value > 0:
            return Const(a.value ** b.value.numerator)
    return Binary("pow", a, b)


def _unary(fn: str, a: Expr) -> Expr:
    if fn == "neg":
        return _neg(a)
    return Unary(fn, a)


def _depends_on_x(e: Expr) -> bool:
    if isinstance(e, Var):
        return True
    if isinstance(e, Unary):
        return _depends_on_x(e.arg)
    if isinstance(e, Binary):
        return _depends_on_x(e.left) or _depends_on_x(e.right)
    return False


# -- differentiation ----------------------------------------------------------


def _d(e: Expr) -> Expr:
    if isinstance(e, (Const, Pi)):
        return ZERO
    if isinstance(e, Var):
        return ONE
    if isinstance(e, Unary):
        u = e.arg
        du = _d(u)
        if e.fn == "neg":
            return _neg(du)
        if _is_const(du, 0):
            return ZERO
        if e.fn == "exp":
            return _mul(e, du)
        if e.fn == "sin":
            return _mul(Unary("cos", u), du)
        if e.fn == "cos":
            return _neg(_mul(Unary("sin", u), du))
        if e.fn == "ln":
            return _div(du, u)
        return _div(du, _mul(Const(Fraction(2)), e))
    u, v = e.left, e.right
    if e.op == "add":
        return _add(_d(u), _d(v))
    if e.op == "sub":
        return _sub(_d(u), _d(v))
    if e.op == "mul":
        return _add(_mul(_d(u), v), _mul(u, _d(v)))
    if e.op == "div":
        du, dv = _d(u), _d(v)
        if _is_const(dv, 0):
            return _div(du, v)
        return _div(_sub(_mul(du, v), _mul(u, dv)), _pow(v, Const(Fraction(2))))
    # pow
    if not _depends_on_x(v):
        du = _d(u)
        if _is_const(du, 0):
            return ZERO
        return _mul(_mul(v, _pow(u, _sub(v, ONE))), du)
    return _d(Unary("exp", _mul(v, Unary("ln", u))))


def differentiate(e: Expr, order: int = 1) -> Expr:
    """Symbolic derivative of order ``order``.

    Only constant folding and 0/1 identities are applied.  A power with an
    x-dependent exponent is differentiated through ``exp(v*ln(u))``.
    """
    if not isinstance(order, int) or order < 1:
        raise ValueError(f"derivative order must be a positive integer, got {order!r}")
    for _ in range(order):
        e = _d(e)
    return e
