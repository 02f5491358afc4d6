"""Exception hierarchy shared by every module."""


class ArithTermError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ArithTermError, ValueError):
    def __init__(self, message, line, column):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


class DivisionByZero(ArithTermError, ZeroDivisionError):
    pass


class UnboundVariable(ArithTermError, KeyError):
    def __init__(self, name):
        super().__init__(name)
        self.name = name

    def __str__(self):
        return f"unbound variable {self.name!r}"


class DomainError(ArithTermError, ValueError):
    """An argument lies outside the domain where a function is defined."""


class BudgetExceeded(ArithTermError):
    """A computation would exceed a configured size/time budget.

    Distinct from mathematical errors: the value exists, it is just too big
    to produce under the current limits.
    """


class InvariantViolation(ArithTermError):
    pass


class ValidityCheckFailed(ArithTermError):
    pass


def show_int(v) -> str:
    """Decimal text for moderate integers, a size note for huge ones."""
    v = int(v)
    if v.bit_length() <= 4000:
        return str(v)
    return f"<{v.bit_length()}-bit number>"
