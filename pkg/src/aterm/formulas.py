"""Closed-form arithmetic terms for gcd, floor(sqrt n), w! and semiprime factors."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union

from . import oracles
from .errors import BudgetExceeded, InvalidBase, NotSemiprime, PreconditionError, SquareInput
from .estimate import estimate_bits
from .evaluate import EvalBudget, EvalStats, Strategy, evaluate
from .term import Literal, Term

__all__ = [
    "GcdMethod", "FactorMode", "FactorResult",
    "auto_base", "check_base", "build_gcd_term", "build_gcd_fraction_term", "gcd",
    "build_isqrt_term", "isqrt_via_term", "build_factorial_term",
    "build_factor_p_term", "factor_semiprime", "totient_semiprime",
    "MAZZANTI_MAX_ARG",
]

MAZZANTI_MAX_ARG = 24


class GcdMethod(str, enum.Enum):
    MAZZANTI = "mazzanti"
    POLY_BASE = "poly_base"
    MODMOD = "modmod"
    EUCLID = "euclid"

    @classmethod
    def parse(cls, name: Union[str, GcdMethod]) -> GcdMethod:
        return cls(name.replace("-", "_") if isinstance(name, str) else name)


class FactorMode(str, enum.Enum):
    PURE = "pure"
    HYBRID = "hybrid"
    ORACLE = "oracle"


@dataclass(frozen=True)
class FactorResult:
    n: int
    p: int
    q: int
    mode: FactorMode
    omega: int
    gamma_bits: int
    verified: bool
    stats: EvalStats = field(default_factory=EvalStats)
    # n = p^2: produced by the oracle square root, not by the closed form
    outside_closed_form: bool = False

    def as_dict(self) -> dict:
        return {
            "n": self.n, "p": self.p, "q": self.q, "mode": self.mode.value,
            "omega": self.omega, "gamma_bits": self.gamma_bits,
            "verified": self.verified, "outside_closed_form": self.outside_closed_form,
        }


def auto_base(a: int, b: int) -> int:
    """Small base that is > gcd(a, b) (since gcd <= min) and at least 4.

    Base 3 satisfies "> 2 and > gcd" but fails whenever b = 1, e.g.
    floor(3^2 / (2*2)) mod 3 = 2 for gcd(1, 1); bases >= 4 have no known failure.
    """
    if a < 1 or b < 1:
        raise PreconditionError("auto_base needs positive integers")
    return max(4, min(a, b) + 1)


def check_base(a: int, b: int, base: int) -> None:
    """Raise InvalidBase unless ``base`` is a valid Kronecker base for gcd(a, b)."""
    if base <= 2 or base <= oracles.gcd_euclid(a, b):
        raise InvalidBase(f"base {base} must exceed both 2 and gcd({a}, {b})")
    if base == 3 and b == 1:
        raise InvalidBase("base 3 gives a wrong gcd when b = 1; use a base of at least 4")


def _lits(*xs: int) -> tuple[Literal, ...]:
    return tuple(Literal(x) for x in xs)


def build_gcd_fraction_term(a: int, b: int, base: int) -> Term:
    """floor(base^(a+ab) / ((base^a - 1)(base^b - 1))), before the final reduction."""
    A, B, N = _lits(a, b, base)
    return N ** (A + A * B) // ((N ** A - 1) * (N ** B - 1))


def _poly_base_term(a: int, b: int, base: int) -> Term:
    return build_gcd_fraction_term(a, b, base) % Literal(base)


def _modmod_term(a: int, b: int, base: int) -> Term:
    # gcd = (-r) mod base, with r = base^(a+ab) mod (base^(a+b) - base^a - base^b + 1)
    A, B, N = _lits(a, b, base)
    r = N ** (A + A * B) % (N ** (A + B) - N ** A - N ** B + 1)
    return (Literal(0) - r) % N


def _mazzanti_term(a: int, b: int) -> Term:
    A, B, two = _lits(a, b, 2)
    numerator = (two ** (A ** 2 * B * (B + 1)) - two ** (A ** 2 * B)) * (two ** (A ** 2 * B ** 2) - 1)
    denominator = (two ** (A ** 2 * B) - 1) * (two ** (A * B ** 2) - 1) * two ** (A ** 2 * B ** 2)
    return numerator // denominator % two ** (A * B)


def build_gcd_term(a: int, b: int, method: Union[GcdMethod, str], base: Optional[int] = None) -> Term:
    """Closed term whose value is gcd(a, b).

    ``base`` applies to poly_base and modmod and defaults to ``auto_base``;
    an explicit base must be > 2 and > gcd(a, b). Mazzanti's form always
    works in base 2 and is limited to arguments up to ``MAZZANTI_MAX_ARG``.
    """
    method = GcdMethod.parse(method)
    if a < 1 or b < 1:
        raise PreconditionError("gcd terms need positive integers")
    if method is GcdMethod.EUCLID:
        raise PreconditionError("euclid is an oracle method and has no term")
    if method is GcdMethod.MAZZANTI:
        if max(a, b) > MAZZANTI_MAX_ARG:
            raise PreconditionError(
                f"mazzanti is limited to a, b <= {MAZZANTI_MAX_ARG} "
                f"(term needs ~{2 * a * a * b * b} bits)"
            )
        return _mazzanti_term(a, b)
    if base is None:
        base = auto_base(a, b)
    else:
        check_base(a, b, base)
    if method is GcdMethod.POLY_BASE:
        return _poly_base_term(a, b, base)
    return _modmod_term(a, b, base)


def gcd(
    a: int,
    b: int,
    method: Union[GcdMethod, str] = GcdMethod.MODMOD,
    base: Optional[int] = None,
    budget: Optional[EvalBudget] = None,
    strategy: Union[Strategy, str, None] = None,
) -> int:
    """gcd(a, b) through the selected closed form. modmod defaults to the rewrite strategy."""
    method = GcdMethod.parse(method)
    if method is GcdMethod.EUCLID:
        if a < 1 or b < 1:
            raise PreconditionError("gcd needs positive integers")
        return oracles.gcd_euclid(a, b)
    if strategy is None:
        strategy = Strategy.REWRITE if method is GcdMethod.MODMOD else Strategy.NAIVE
    value, _ = evaluate(build_gcd_term(a, b, method, base), budget=budget, strategy=strategy)
    return value


def build_isqrt_term(n: int) -> Term:
    """Closed term for floor(sqrt n), valid for non-square n >= 3.

    Built for any n >= 2 so the n = 2 failure (the term gives 0) can be shown.
    """
    if n < 2:
        raise PreconditionError("the square-root term needs n >= 2 (n = 1 divides by zero)")
    N = Literal(n)
    A = N ** (2 * N) + 1
    M = N ** (4 * N) - N
    return A ** (2 * N + 1) % M // (A ** (2 * N) % M) - 1


def isqrt_via_term(
    n: int,
    budget: Optional[EvalBudget] = None,
    strategy: Union[Strategy, str] = Strategy.REWRITE,
) -> tuple[int, EvalStats, bool]:
    """floor(sqrt n) through the closed term where it is valid.

    Returns ``(value, stats, used_term)``; n < 3 is routed to the oracle.
    """
    if n < 0:
        raise PreconditionError("isqrt of a negative number")
    if n < 3:
        return oracles.isqrt(n), EvalStats(), False
    value, stats = evaluate(build_isqrt_term(n), budget=budget, strategy=strategy)
    return value, stats, True


def build_factorial_term(w: int) -> Term:
    """Closed term for w!, for w >= 2.

    With r = (w+1)^(w+2) the inner floor-and-mod extracts C(r, w) from the
    base-(w+1)^(w(w+2)) expansion of ((w+1)^(w(w+2)) + 1)^r.
    """
    if w < 2:
        raise PreconditionError("the factorial term needs w >= 2 (w = 1 divides by zero)")
    W = Literal(w)
    B = W + 1
    digit = B ** (W * (W + 2))
    binom = (digit + 1) ** (B ** (W + 2)) // B ** (W ** 2 * (W + 2)) % digit
    return digit // binom


def build_factor_p_term(n: int, gamma: int, method: Union[GcdMethod, str] = GcdMethod.POLY_BASE) -> Term:
    """gcd(n, gamma) term in base n, the smaller prime factor when gamma = floor(sqrt n)!.

    No base check: for a non-semiprime the term may evaluate to 0 and the
    pipeline's verification rejects it.
    """
    method = GcdMethod.parse(method)
    if method is GcdMethod.POLY_BASE:
        return _poly_base_term(n, gamma, n)
    if method is GcdMethod.MODMOD:
        return _modmod_term(n, gamma, n)
    raise PreconditionError(f"factor term supports poly_base and modmod, not {method.value}")


def _checked_evaluate(t: Term, budget: EvalBudget, what: str, strategy=Strategy.NAIVE):
    # The estimator overshoots (w = 6 is bounded at ~1.1e9 bits but peaks at ~7.8e8),
    # so rely on the online checks, which trip before any oversized value is built,
    # and attach the estimate to the error.
    try:
        return evaluate(t, budget=budget, strategy=strategy)
    except BudgetExceeded as exc:
        try:
            bound = estimate_bits(t, budget=budget).total_bound_bits
        except BudgetExceeded as inner:
            bound = inner.bound_bits
        raise BudgetExceeded(
            max(bound, exc.bound_bits), budget.max_bits,
            f"the {what} term is estimated at {bound} bits; use --mode hybrid",
        ) from exc


def factor_semiprime(
    n: int,
    mode: Union[FactorMode, str] = FactorMode.HYBRID,
    budget: Optional[EvalBudget] = None,
    strict: bool = False,
    trace: bool = False,
) -> FactorResult:
    """Split a semiprime n = p*q (p <= q).

    pure: floor(sqrt n), floor(sqrt n)! and gcd(n, floor(sqrt n)!) all from terms.
    hybrid: square root and factorial from oracles, gcd from the modmod term
    evaluated with modular exponentiation.
    oracle: trial division.

    Squares of a prime come back as p = q with ``outside_closed_form`` set
    (or raise SquareInput when ``strict``). Raises NotSemiprime when the
    result fails verification, BudgetExceeded when a pure-mode term is too big.
    ``trace`` keeps per-node bit lengths of the hybrid gcd term in ``stats.node_bits``.
    """
    mode = FactorMode(mode)
    budget = budget or EvalBudget()
    if n < 4:
        raise PreconditionError("factor_semiprime needs n >= 4")

    root = oracles.isqrt(n)
    if root * root == n:
        if strict:
            raise SquareInput(f"{n} = {root}^2 is a square")
        result = FactorResult(n, root, root, mode, root, 0, oracles.is_prime(root),
                              outside_closed_form=True)
        if not result.verified:
            raise NotSemiprime(f"{n} = {root}^2 with {root} composite", result)
        return result

    stats = EvalStats()
    gamma = None
    if mode is FactorMode.ORACLE:
        factors = oracles.trial_division(n)
        if len(factors) != 2:
            raise NotSemiprime(f"{n} has prime factors {factors}")
        p, omega = factors[0], root
    elif mode is FactorMode.PURE:
        omega, s1, _ = isqrt_via_term(n, budget)
        gamma, s2 = _checked_evaluate(build_factorial_term(omega), budget, "factorial")
        p, s3 = _checked_evaluate(build_factor_p_term(n, gamma, GcdMethod.POLY_BASE), budget, "gcd")
        stats = s1.combine(s2).combine(s3)
    else:
        omega = root
        gamma = oracles.factorial(omega)
        p, stats = evaluate(build_factor_p_term(n, gamma, GcdMethod.MODMOD), budget=budget,
                            strategy=Strategy.REWRITE, trace=trace)

    gamma_bits = gamma.bit_length() if gamma is not None else 0
    q = n // p if p > 0 else 0
    verified = p > 0 and p * q == n and p < q and oracles.is_prime(p) and oracles.is_prime(q)
    result = FactorResult(n, p, q, mode, omega, gamma_bits, verified, stats)
    if not verified:
        raise NotSemiprime(f"{n} is not a non-square semiprime (got p={p}, q={q})", result)
    return result


def totient_semiprime(
    n: int,
    mode: Union[FactorMode, str] = FactorMode.HYBRID,
    budget: Optional[EvalBudget] = None,
) -> int:
    """phi(n) = (p - 1)(q - 1) with p, q from ``factor_semiprime``."""
    r = factor_semiprime(n, mode, budget)
    if r.p == r.q:
        return r.p * (r.p - 1)
    return (r.p - 1) * (r.q - 1)
