"""Arithmetic-term AST, text grammar and renderer.

Grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := power (('*' | '/' | '%') power)*
    power  := atom ('^' power)?
    atom   := NUMBER | IDENT | '(' expr ')'

``/`` is floored division. There is no unary minus; write ``0-x``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import ClassVar, Iterator, Union

from .errors import TermSyntaxError

__all__ = [
    "Term", "Literal", "Variable", "BinOp",
    "Add", "Sub", "Mul", "FloorDiv", "Pow", "Mod",
    "parse", "render", "walk", "free_variables", "lift",
]


class Term:
    """Base class for AST nodes. Nodes are immutable and compare structurally."""

    __slots__ = ()

    # Operator sugar so formulas read close to their mathematical form.
    def __add__(self, other): return Add(self, lift(other))
    def __radd__(self, other): return Add(lift(other), self)
    def __sub__(self, other): return Sub(self, lift(other))
    def __rsub__(self, other): return Sub(lift(other), self)
    def __mul__(self, other): return Mul(self, lift(other))
    def __rmul__(self, other): return Mul(lift(other), self)
    def __floordiv__(self, other): return FloorDiv(self, lift(other))
    def __rfloordiv__(self, other): return FloorDiv(lift(other), self)
    def __mod__(self, other): return Mod(self, lift(other))
    def __rmod__(self, other): return Mod(lift(other), self)
    def __pow__(self, other): return Pow(self, lift(other))
    def __rpow__(self, other): return Pow(lift(other), self)

    @property
    def children(self) -> tuple[Term, ...]:
        return ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, slots=True)
class Literal(Term):
    value: int

    def __post_init__(self):
        if isinstance(self.value, bool) or not isinstance(self.value, int):
            raise TypeError(f"literal must be an int, got {type(self.value).__name__}")
        if self.value < 0:
            raise ValueError("literals are non-negative; express negation with Sub")


@dataclass(frozen=True, slots=True)
class Variable(Term):
    name: str

    def __post_init__(self):
        if not (self.name.isascii() and self.name.isidentifier()):
            raise ValueError(f"invalid variable name {self.name!r}")


@dataclass(frozen=True, slots=True)
class BinOp(Term):
    left: Term
    right: Term

    symbol: ClassVar[str] = "?"
    precedence: ClassVar[int] = 0
    right_assoc: ClassVar[bool] = False

    @property
    def children(self) -> tuple[Term, ...]:
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class Add(BinOp):
    symbol = "+"
    precedence = 1


@dataclass(frozen=True, slots=True)
class Sub(BinOp):
    symbol = "-"
    precedence = 1


@dataclass(frozen=True, slots=True)
class Mul(BinOp):
    symbol = "*"
    precedence = 2


@dataclass(frozen=True, slots=True)
class FloorDiv(BinOp):
    symbol = "/"
    precedence = 2


@dataclass(frozen=True, slots=True)
class Mod(BinOp):
    symbol = "%"
    precedence = 2


@dataclass(frozen=True, slots=True)
class Pow(BinOp):
    symbol = "^"
    precedence = 3
    right_assoc = True


_ATOM_PRECEDENCE = 4
_OPS: dict[str, type[BinOp]] = {cls.symbol: cls for cls in (Add, Sub, Mul, FloorDiv, Mod, Pow)}


def lift(x: Union[Term, int, str]) -> Term:
    """Coerce an int (literal) or str (variable name) to a Term."""
    if isinstance(x, Term):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Literal(x)
    if isinstance(x, str):
        return Variable(x)
    raise TypeError(f"cannot build a term from {type(x).__name__}")


def walk(t: Term, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], Term]]:
    """Yield ``(path, node)`` in preorder; a path is the tuple of child indices from the root."""
    stack = [(path, t)]
    while stack:
        p, node = stack.pop()
        yield p, node
        kids = node.children
        for i in range(len(kids) - 1, -1, -1):
            stack.append((p + (i,), kids[i]))


def free_variables(t: Term) -> set[str]:
    return {node.name for _, node in walk(t) if isinstance(node, Variable)}


# --- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:  # trailing whitespace
            break
        if m.group(1) is not None:
            tokens.append(("num", int(m.group(1)), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("ident", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch, at = m.group(3), m.start(3)
            if ch in _OPS or ch in "()":
                tokens.append((ch, ch, at))
            else:
                raise TermSyntaxError(f"unexpected character {ch!r}", text, at)
        pos = m.end()
    tokens.append(("eof", None, n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str, tok=None):
        tok = tok or self.peek()
        return TermSyntaxError(message, self.text, tok[2])

    def parse(self) -> Term:
        t = self.expr()
        if self.peek()[0] != "eof":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return t

    def binary_level(self, ops: str, operand) -> Term:
        left = operand()
        while self.peek()[0] in ops:
            cls = _OPS[self.advance()[0]]
            left = cls(left, operand())
        return left

    def expr(self) -> Term:
        return self.binary_level("+-", self.term)

    def term(self) -> Term:
        return self.binary_level("*/%", self.power)

    def power(self) -> Term:
        base = self.atom()
        if self.peek()[0] == "^":
            self.advance()
            return Pow(base, self.power())
        return base

    def atom(self) -> Term:
        kind, value, _ = tok = self.advance()
        if kind == "num":
            return Literal(value)
        if kind == "ident":
            return Variable(value)
        if kind == "(":
            inner = self.expr()
            if self.peek()[0] != ")":
                raise self.error("expected ')'")
            self.advance()
            return inner
        if kind == "-":
            raise self.error("negative literals and unary minus are not allowed; write 0-x", tok)
        if kind == "eof":
            raise self.error("unexpected end of input", tok)
        raise self.error(f"unexpected token {value!r}", tok)


def parse(text: str) -> Term:
    """Parse expression text into a Term, raising TermSyntaxError with a position."""
    return _Parser(text).parse()


# --- rendering ---------------------------------------------------------------

def _prec(t: Term) -> int:
    return t.precedence if isinstance(t, BinOp) else _ATOM_PRECEDENCE


def render(t: Term) -> str:
    """Render with the fewest parentheses that still parse back to ``t``."""
    if isinstance(t, Literal):
        return str(t.value)
    if isinstance(t, Variable):
        return t.name
    p = t.precedence
    left, right = render(t.left), render(t.right)
    # Left-assoc: right operand at equal precedence needs parens; right-assoc: the left one does.
    if _prec(t.left) < p or (t.right_assoc and _prec(t.left) == p):
        left = f"({left})"
    if _prec(t.right) < p or (not t.right_assoc and _prec(t.right) == p):
        right = f"({right})"
    return f"{left}{t.symbol}{right}"
