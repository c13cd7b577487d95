"""High-precision scalar root finding with nonstationary one-point iterations."""

from .analysis import (
    EfficiencyReport,
    OrderEquation,
    efficiency_indices,
    empirical_order,
    kung_traub_comparison,
    order_sequence,
    solve_order_equation,
)
from .divdiff import DividedDifferenceTable, DuplicateNode
from .expr import ParseError, differentiate, evaluate, parse, to_text
from .methods import (
    METHODS,
    IterationTrace,
    MethodConfig,
    Problem,
    run_chebyshev,
    run_generalized_secant,
    run_halley,
    run_method,
    run_newton,
    run_nonstationary_chebyshev,
    run_nonstationary_generic,
    run_nonstationary_halley,
    run_nonstationary_s1,
    run_secant,
)
from .numctx import DivisionByZero, DomainError, NumericContext

__version__ = "0.1.0"
