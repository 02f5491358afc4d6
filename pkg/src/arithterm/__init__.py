"""Arithmetic terms for generating and counting special primes."""
from .errors import (ArithTermError, BudgetExceeded, DivisionByZero, DomainError,
                     InvariantViolation, ParseError, UnboundVariable, ValidityCheckFailed)
from .terms import Term, evaluate, parse, render

__version__ = "0.1.0"
