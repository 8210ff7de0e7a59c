"""Exception hierarchy shared by the evaluator, formula builders and CLI."""


class ATermError(Exception):
    """Base class for every error raised by this package."""


class TermSyntaxError(ATermError, ValueError):
    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position}")

    def caret(self) -> str:
        """Two-line rendering of the input with a caret under the offending column."""
        return f"{self.text}\n{' ' * self.position}^"


class UnboundVariable(ATermError, KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(name)

    def __str__(self) -> str:
        return f"unbound variable {self.name!r}"


class EvalDomainError(ATermError, ArithmeticError):
    """An operation was applied outside its mathematical domain."""


class DivisionByZero(EvalDomainError, ZeroDivisionError):
    pass


class NegativeExponent(EvalDomainError):
    pass


class BudgetExceeded(ATermError):
    """An intermediate value would exceed the configured bit ceiling.

    ``bound_bits`` is the size (actual or estimated) that tripped the check.
    """

    def __init__(self, bound_bits: int, max_bits: int, detail: str = ""):
        self.bound_bits = bound_bits
        self.max_bits = max_bits
        msg = f"intermediate of up to {bound_bits} bits exceeds budget of {max_bits} bits"
        if detail:
            msg = f"{msg}; {detail}"
        super().__init__(msg)


class PreconditionError(ATermError, ValueError):
    """Arguments outside the documented domain of a formula or oracle."""


class InvalidBase(PreconditionError):
    pass


class SquareInput(PreconditionError):
    pass


class NotSemiprime(ATermError):
    """A factorization result failed verification.

    The unverified result is attached as ``result`` when one was produced.
    """

    def __init__(self, message: str, result=None):
        self.result = result
        super().__init__(message)
