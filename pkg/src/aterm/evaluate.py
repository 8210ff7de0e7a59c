"""Exact big-integer evaluation of arithmetic terms.

Values are carried as ``gmpy2.mpz`` internally and returned as ``int``.
Division floors toward negative infinity and ``a % b`` has the sign of ``b``,
so ``a % b == a - b*(a/b)`` holds for every ``b != 0``.
"""

from __future__ import annotations

import enum
import os
import time
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

import gmpy2
from gmpy2 import mpz

from .errors import BudgetExceeded, DivisionByZero, NegativeExponent, UnboundVariable
from .term import Add, FloorDiv, Literal, Mod, Mul, Pow, Sub, Term, Variable, parse

__all__ = [
    "DEFAULT_MAX_BITS", "MAX_EXPONENT", "EvalBudget", "EvalStats", "Strategy",
    "evaluate", "modexp",
]

DEFAULT_MAX_BITS = 1 << 30
MAX_EXPONENT = 1 << 63
BUDGET_ENV_VAR = "ATERM_BUDGET_BITS"

# Below this modulus size GMP's powmod wins; above it the reduction-skipping loop does.
_SMALL_MODULUS_BITS = 1 << 14

Path = tuple[int, ...]


class Strategy(str, enum.Enum):
    NAIVE = "naive"
    REWRITE = "rewrite"


@dataclass(frozen=True)
class EvalBudget:
    max_bits: int = DEFAULT_MAX_BITS

    def __post_init__(self):
        if self.max_bits < 64:
            raise ValueError(f"max_bits must be at least 64, got {self.max_bits}")

    @classmethod
    def from_env(cls, default: int = DEFAULT_MAX_BITS) -> EvalBudget:
        """Budget from ``ATERM_BUDGET_BITS`` if set, else ``default``."""
        raw = os.environ.get(BUDGET_ENV_VAR)
        return cls(int(raw) if raw else default)


@dataclass(frozen=True)
class EvalStats:
    peak_bits: int = 0
    mul_count: int = 0
    pow_count: int = 0
    div_count: int = 0
    elapsed: float = 0.0
    # path -> bit length of every materialized node, when tracing was requested
    node_bits: Optional[Mapping[Path, int]] = field(default=None, compare=False, repr=False)

    def combine(self, other: EvalStats) -> EvalStats:
        """Aggregate two evaluations run one after the other (traces are dropped)."""
        return EvalStats(
            peak_bits=max(self.peak_bits, other.peak_bits),
            mul_count=self.mul_count + other.mul_count,
            pow_count=self.pow_count + other.pow_count,
            div_count=self.div_count + other.div_count,
            elapsed=self.elapsed + other.elapsed,
        )


def _bits(v) -> int:
    return v.bit_length()


def modexp(base, exp, mod, observe=None):
    """``base**exp % mod`` for ``mod > 0`` and ``exp >= 0``.

    For huge moduli with a small base, the leading bits of the exponent give a
    power that is provably below ``mod``; that prefix is computed outright and
    only the remaining bits pay for a square-and-reduce step. ``observe`` is
    called with the bit length of each unreduced intermediate.
    """
    base, mod, exp = mpz(base), mpz(mod), int(exp)
    if mod <= 0:
        raise ValueError("modulus must be positive")
    if exp < 0:
        raise ValueError("exponent must be non-negative")
    if mod.bit_length() <= _SMALL_MODULUS_BITS:
        return gmpy2.powmod(base, exp, mod)
    b = base % mod
    if exp == 0:
        return mpz(1) % mod
    if b <= 1:
        return b
    mbits, bbits = mod.bit_length(), b.bit_length()
    s = exp.bit_length()
    while s > 0 and (exp >> (s - 1)) * bbits < mbits:
        s -= 1
    x = b ** (exp >> s)  # < 2**(mbits-1) <= mod
    for i in range(s - 1, -1, -1):
        x = x * x
        if (exp >> i) & 1:
            x = x * b
        if observe is not None:
            observe(x.bit_length())
        x = x % mod
    return x


class _Evaluator:
    def __init__(self, env, budget: EvalBudget, strategy: Strategy, trace: bool):
        self.env = env
        self.max_bits = budget.max_bits
        self.rewrite = strategy is Strategy.REWRITE
        self.trace: Optional[dict] = {} if trace else None
        self.peak = 0
        self.muls = self.pows = self.divs = 0

    def over(self, bound: int, detail: str = ""):
        return BudgetExceeded(bound, self.max_bits, detail)

    def note(self, path: Path, value):
        b = _bits(value)
        if b > self.max_bits:
            raise self.over(b)
        if b > self.peak:
            self.peak = b
        if self.trace is not None:
            self.trace[path] = b
        return value

    def observe(self, bits: int):
        if bits > self.peak:
            self.peak = bits

    def mul(self, a, b):
        bound = _bits(a) + _bits(b)
        if bound > self.max_bits:
            raise self.over(bound, "product")
        self.muls += 1
        return a * b

    def power(self, b, e):
        if e < 0:
            raise NegativeExponent(f"negative exponent {e}")
        self.pows += 1
        if e == 0:
            return mpz(1)  # includes 0^0
        if -1 <= b <= 1:
            return b if (b >= 0 or e % 2) else -b
        if e >= MAX_EXPONENT:
            raise self.over(int(e) * _bits(b), "exponent is not below 2^63")
        bound = int(e) * _bits(b)
        if bound > self.max_bits:
            raise self.over(bound, "power")
        return b ** int(e)

    def floordiv(self, a, b):
        if b == 0:
            raise DivisionByZero("floored division by zero")
        self.divs += 1
        return a // b

    def mod(self, a, b):
        if b == 0:
            raise DivisionByZero("modulo by zero")
        self.divs += 1
        return a % b

    def eval(self, t: Term, path: Path = ()):
        if isinstance(t, Literal):
            return self.note(path, mpz(t.value))
        if isinstance(t, Variable):
            try:
                v = self.env[t.name]
            except KeyError:
                raise UnboundVariable(t.name) from None
            return self.note(path, mpz(v))
        if isinstance(t, Mod) and self.rewrite and _has_power_factor(t.left):
            return self.note(path, self.mod_rewrite(t, path))
        a = self.eval(t.left, path + (0,))
        b = self.eval(t.right, path + (1,))
        if isinstance(t, Add):
            v = a + b
        elif isinstance(t, Sub):
            v = a - b
        elif isinstance(t, Mul):
            v = self.mul(a, b)
        elif isinstance(t, FloorDiv):
            v = self.floordiv(a, b)
        elif isinstance(t, Mod):
            v = self.mod(a, b)
        elif isinstance(t, Pow):
            v = self.power(a, b)
        else:
            raise TypeError(f"not a term node: {t!r}")
        return self.note(path, v)

    def mod_rewrite(self, t: Mod, path: Path):
        # Operands are evaluated in the same order as the naive walk so that
        # domain errors surface identically; only the powers are deferred.
        pieces = []
        for fpath, factor in _mul_factors(t.left, path + (0,)):
            if isinstance(factor, Pow):
                b = self.eval(factor.left, fpath + (0,))
                e = self.eval(factor.right, fpath + (1,))
                if e < 0:
                    raise NegativeExponent(f"negative exponent {e}")
                if e >= MAX_EXPONENT and not -1 <= b <= 1:
                    raise self.over(int(e) * _bits(b), "exponent is not below 2^63")
                pieces.append((b, e))
            else:
                pieces.append((self.eval(factor, fpath), None))
        m = self.eval(t.right, path + (1,))
        if m == 0:
            raise DivisionByZero("modulo by zero")
        self.divs += 1
        if m > 0:
            try:
                return self.reduced_product(pieces, m)
            except BudgetExceeded:
                # a huge modulus can make the reduced route costlier than the plain one
                pass
        # Plain route: redo the left operand exactly as the naive walk would.
        saved, self.rewrite = self.rewrite, False
        try:
            a = self.eval(t.left, path + (0,))
        finally:
            self.rewrite = saved
        return a % m

    def reduced_product(self, pieces, m):
        acc = mpz(1) % m
        for v, e in pieces:
            if e is not None:
                work = 2 * _bits(m) + _bits(v)
                if work > self.max_bits:
                    raise self.over(work, "modular exponentiation")
                self.pows += 1
                r = modexp(v, e, m, observe=self.observe)
            else:
                r = v % m
            acc = self.mul(acc, r) % m
        return acc


def _mul_factors(t: Term, path: Path):
    """Flatten a chain of Mul nodes into ``(path, factor)`` pairs, left to right."""
    if isinstance(t, Mul):
        return _mul_factors(t.left, path + (0,)) + _mul_factors(t.right, path + (1,))
    return [(path, t)]


def _has_power_factor(t: Term) -> bool:
    return any(isinstance(f, Pow) for _, f in _mul_factors(t, ()))


def evaluate(
    t: Union[Term, str],
    env: Optional[Mapping[str, int]] = None,
    budget: Optional[EvalBudget] = None,
    strategy: Union[Strategy, str] = Strategy.NAIVE,
    trace: bool = False,
) -> tuple[int, EvalStats]:
    """Evaluate ``t`` exactly under ``env``.

    Under ``Strategy.REWRITE`` every ``Mod`` whose left operand is a power, or
    a product containing powers, is computed by modular exponentiation when
    the modulus is positive. The result is identical to the naive walk; only
    the size of the intermediates differs.

    With ``trace=True`` the returned stats carry the bit length of every node
    that was materialized, keyed by path. Powers absorbed by the rewrite have
    no entry.

    Raises DivisionByZero, NegativeExponent, BudgetExceeded or UnboundVariable.
    """
    if isinstance(t, str):
        t = parse(t)
    ev = _Evaluator(env or {}, budget or EvalBudget(), Strategy(strategy), trace)
    start = time.perf_counter()
    value = ev.eval(t)
    elapsed = time.perf_counter() - start
    stats = EvalStats(
        peak_bits=ev.peak,
        mul_count=ev.muls,
        pow_count=ev.pows,
        div_count=ev.divs,
        elapsed=elapsed,
        node_bits=ev.trace,
    )
    return int(value), stats
