"""Prime generators built from Wilson's theorem.

For m >= 1, (c * m!) mod (m+1) vanishes when m+1 is composite (apart from
m+1 = 4) and equals m+1-c when m+1 is prime, so

    t(m) = 2 + (2 m!) mod (m+1),    z(m) = 3 + (3 m!) mod (m+1)

return m+1 on primes and a fixed small prime otherwise.  Composing them
with m = 2^(n+1) - 2 and friends yields terms whose values are always
Mersenne, Fermat, twin or Sophie Germain primes.

Every generator has two evaluation paths: a semantic one built on a modular
factorial loop, and a term whose Fact nodes are evaluated directly.
"""
from __future__ import annotations

import math

from .config import bit_budget as _bit_budget
from .errors import BudgetExceeded, DomainError
from .oracles import is_prime
from .terms import (Add, Const, Fact, FactorialScheme, Min, Mod, Monus, Mul, Pow2,
                    Term, Var, evaluate)
from .terms import factorial_term as _factorial_term

FACTORIAL_SEMANTIC_MAX = 5000
_CHUNK = 512


def factorial_semantic(n: int) -> int:
    if n < 0:
        raise DomainError("negative argument")
    if n > FACTORIAL_SEMANTIC_MAX:
        raise BudgetExceeded(f"{n}! is beyond the semantic limit {FACTORIAL_SEMANTIC_MAX}")
    return math.factorial(n)


def factorial_mod(n: int, m: int) -> int:
    """n! mod m with a chunked product loop."""
    if n < 0 or m < 1:
        raise DomainError("need n >= 0 and m >= 1")
    acc = 1 % m
    i = 2
    while i <= n and acc:
        j = min(i + _CHUNK, n + 1)
        acc = acc * math.prod(range(i, j)) % m
        i = j
    return acc


def factorial_term(scheme: FactorialScheme = FactorialScheme.POW8SQ, var: str = "n") -> Term:
    return _factorial_term(Var(var), scheme)


def factorial_term_eval(n: int, scheme: FactorialScheme = FactorialScheme.POW8SQ,
                        bit_budget: int | None = None) -> int:
    """The quotient r(n)^n / binom(r(n), n), binomial taken as primitive."""
    return evaluate(factorial_term(scheme), {"n": n}, _bit_budget(bit_budget))


# ---------------------------------------------------------------------------
# Wilson generators

def wilson_gen(c: int, n: int) -> int:
    """c + (c * n!) mod (n+1) for c in {2, 3}."""
    if c not in (2, 3):
        raise DomainError("c must be 2 or 3")
    if n < 0:
        raise DomainError("negative argument")
    return c + c * factorial_mod(n, n + 1) % (n + 1)


def t_gen(n: int) -> int:
    return wilson_gen(2, n)


def z_gen(n: int) -> int:
    return wilson_gen(3, n)


def wilson_term(c: int, arg: Term) -> Term:
    return Add(Const(c), Mod(Mul(Const(c), Fact(arg)), Add(arg, Const(1))))


N = Var("n")

# modular factorials up to 2^21 are acceptable for the semantic path
_MERSENNE_MAX = {1: 20, 2: 20}
_FERMAT_MAX = {1: 16, 2: 4}


def mersenne_gen(n: int, variant: int = 1) -> int:
    """m1(n) = z(2^(n+1) - 2), m2(n) = z(2^t(n) - 2)."""
    if variant not in _MERSENNE_MAX:
        raise DomainError("variant must be 1 or 2")
    if n < 0:
        raise DomainError("negative argument")
    if n > _MERSENNE_MAX[variant]:
        raise BudgetExceeded(f"m{variant}({n}) needs about 2^{n + 1} multiplications")
    e = n + 1 if variant == 1 else t_gen(n)
    return z_gen((1 << e) - 2)


def fermat_gen(n: int, variant: int = 1) -> int:
    """f1(n) = z(2^(n+2)), f2(n) = z(2^(2^n))."""
    if variant not in _FERMAT_MAX:
        raise DomainError("variant must be 1 or 2")
    if n < 0:
        raise DomainError("negative argument")
    if n > _FERMAT_MAX[variant]:
        raise BudgetExceeded(f"f{variant}({n}) is beyond the semantic budget")
    e = n + 2 if variant == 1 else 1 << n
    return z_gen(1 << e)


def twin_gen(n: int) -> tuple:
    """(p1, p1 + 2) with p1 = min(z(n+2), z(n+4))."""
    if n < 0:
        raise DomainError("negative argument")
    p1 = min(z_gen(n + 2), z_gen(n + 4))
    return p1, p1 + 2


def sophie_gen(n: int) -> int:
    """g(n) = min(t(n), t(2n+2))."""
    if n < 0:
        raise DomainError("negative argument")
    return min(t_gen(n), t_gen(2 * n + 2))


# terms with Fact as a primitive node

def mersenne_term(variant: int = 1) -> Term:
    e = Add(N, Const(1)) if variant == 1 else wilson_term(2, N)
    return wilson_term(3, Monus(Pow2(e), Const(2)))


def fermat_term(variant: int = 1) -> Term:
    e = Add(N, Const(2)) if variant == 1 else Pow2(N)
    return wilson_term(3, Pow2(e))


def twin_term() -> Term:
    """p1(n); the partner is p1 + 2."""
    return Min(wilson_term(3, Add(N, Const(2))), wilson_term(3, Add(N, Const(4))))


def sophie_term() -> Term:
    return Min(wilson_term(2, N), wilson_term(2, Add(Mul(Const(2), N), Const(2))))


FAMILIES = ("mersenne", "fermat", "twin", "sophie")


def generator_term(family: str, variant: int = 1) -> Term:
    if family == "mersenne":
        return mersenne_term(variant)
    if family == "fermat":
        return fermat_term(variant)
    if family == "twin":
        return twin_term()
    if family == "sophie":
        return sophie_term()
    raise DomainError(f"unknown family {family!r}")


def generate(family: str, n: int, variant: int = 1, mode: str = "semantic",
             bit_budget: int | None = None):
    """One generator value; twin values are pairs."""
    if mode == "term":
        v = evaluate(generator_term(family, variant), {"n": n}, bit_budget)
        return (v, v + 2) if family == "twin" else v
    if mode != "semantic":
        raise DomainError(f"unknown mode {mode!r}")
    if family == "mersenne":
        return mersenne_gen(n, variant)
    if family == "fermat":
        return fermat_gen(n, variant)
    if family == "twin":
        return twin_gen(n)
    if family == "sophie":
        return sophie_gen(n)
    raise DomainError(f"unknown family {family!r}")


def z_exceptions(limit: int) -> list:
    """Arguments m <= limit where z(m) is neither m+1 (prime) nor 3."""
    out = []
    for m in range(2, limit + 1):
        expected = m + 1 if is_prime(m + 1) else 3
        if z_gen(m) != expected:
            out.append(m)
    return out

