"""Conservative bit-length bounds for every node of a term.

Only exponents are evaluated (they have to be known exactly to bound a
power); every other node is bounded from its children's bounds:

    a+b, a-b    max(bits a, bits b) + 1
    a*b         bits a + bits b
    a^e         e * bits a            (1 when e == 0 or |a| <= 1)
    a/b         bits a
    a%b         bits b
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .errors import BudgetExceeded, DivisionByZero, NegativeExponent, UnboundVariable
from .evaluate import MAX_EXPONENT, EvalBudget, Path, Strategy, evaluate
from .term import Add, FloorDiv, Literal, Mod, Mul, Pow, Sub, Term, Variable, parse, walk

__all__ = ["SizeEstimate", "estimate_bits"]


@dataclass(frozen=True)
class SizeEstimate:
    bounds: Mapping[Path, int]
    total_bound_bits: int  # largest bound over all nodes, i.e. the peak-intermediate bound

    @property
    def root_bits(self) -> int:
        return self.bounds[()]

    def table(self, t: Term) -> list[tuple[Path, Term, int]]:
        """``(path, node, bound)`` rows in preorder, for nodes that were bounded."""
        return [(p, node, self.bounds[p]) for p, node in walk(t) if p in self.bounds]


def estimate_bits(
    t: Term | str,
    env: Optional[Mapping[str, int]] = None,
    budget: Optional[EvalBudget] = None,
) -> SizeEstimate:
    """Bound the bit length of every subterm of ``t`` without evaluating it.

    ``budget`` only governs the exact evaluation of exponent subterms.
    Raises DivisionByZero for a literal zero divisor, NegativeExponent when an
    exponent evaluates below zero, and BudgetExceeded for exponents >= 2**63.
    """
    if isinstance(t, str):
        t = parse(t)
    env = env or {}
    budget = budget or EvalBudget()
    bounds: dict[Path, int] = {}

    def exponent_value(e: Term) -> int:
        value, _ = evaluate(e, env, budget, Strategy.REWRITE)
        return value

    def go(node: Term, path: Path) -> int:
        if isinstance(node, Literal):
            b = max(1, node.value.bit_length())
        elif isinstance(node, Variable):
            if node.name not in env:
                raise UnboundVariable(node.name)
            b = max(1, int(env[node.name]).bit_length())
        else:
            lb = go(node.left, path + (0,))
            rb = go(node.right, path + (1,))
            if isinstance(node, (Add, Sub)):
                b = max(lb, rb) + 1
            elif isinstance(node, Mul):
                b = lb + rb
            elif isinstance(node, FloorDiv):
                _check_divisor(node.right)
                b = lb
            elif isinstance(node, Mod):
                _check_divisor(node.right)
                b = rb
            elif isinstance(node, Pow):
                e = exponent_value(node.right)
                if e < 0:
                    raise NegativeExponent(f"negative exponent {e} in {node}")
                if e == 0 or lb <= 1:
                    b = 1
                elif e >= MAX_EXPONENT:
                    raise BudgetExceeded(e * lb, budget.max_bits, "exponent is not below 2^63")
                else:
                    b = e * lb
            else:
                raise TypeError(f"not a term node: {node!r}")
        bounds[path] = b
        return b

    go(t, ())
    return SizeEstimate(bounds=bounds, total_bound_bits=max(bounds.values()))


def _check_divisor(d: Term) -> None:
    if isinstance(d, Literal) and d.value == 0:
        raise DivisionByZero("literal zero divisor")
