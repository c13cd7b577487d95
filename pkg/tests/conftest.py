import mpmath
import pytest

from nonstationary.methods import Problem
from nonstationary.numctx import NumericContext

EQ21 = "x^2 - exp((1/x) * sin(pi * x^2 / 2)) - 1"
TABLE_POINTS = ("1.7", "1.6", "1.5")


def eq21_mp(mp):
    """The test function written directly against mpmath, independent of the parser."""
    return lambda x: x**2 - mp.exp((1 / x) * mp.sin(mp.pi * x**2 / 2)) - 1


def bisect_root(fn, lo, hi, mp, width):
    flo = fn(lo)
    assert flo * fn(hi) < 0
    while hi - lo > width:
        mid = (lo + hi) / 2
        fm = fn(mid)
        if fm * flo > 0:
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


@pytest.fixture(scope="session")
def ctx():
    return NumericContext(120)


@pytest.fixture(scope="session")
def eq21_root(ctx):
    # Bisection on a bracket, not sqrt(2): the root value itself is under test.
    mp = mpmath.MPContext()
    mp.dps = 130
    root = bisect_root(eq21_mp(mp), mp.mpf("1.3"), mp.mpf("1.5"), mp, mp.mpf(10) ** -125)
    return ctx.real(root)


@pytest.fixture
def eq21(ctx, eq21_root):
    return Problem(EQ21, ctx, root_hint=eq21_root)


# One line per acceptance criterion, echoed in the terminal summary.
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
