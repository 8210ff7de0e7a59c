"""Arithmetic terms: parse, render, evaluate and size-bound integer expressions,
plus closed-form number-theoretic formulas checked against classical oracles."""

from . import oracles
from .errors import (
    ATermError, BudgetExceeded, DivisionByZero, EvalDomainError, InvalidBase, NegativeExponent,
    NotSemiprime, PreconditionError, SquareInput, TermSyntaxError, UnboundVariable,
)
from .estimate import SizeEstimate, estimate_bits
from .evaluate import EvalBudget, EvalStats, Strategy, evaluate, modexp
from .formulas import (
    FactorMode, FactorResult, GcdMethod, auto_base, build_factor_p_term, build_factorial_term,
    build_gcd_term, build_isqrt_term, factor_semiprime, gcd, isqrt_via_term, totient_semiprime,
)
from .harness import BenchRecord, VerificationReport, run_bench, run_verify
from .term import (
    Add, FloorDiv, Literal, Mod, Mul, Pow, Sub, Term, Variable, free_variables, parse, render, walk,
)

__version__ = "0.1.0"
