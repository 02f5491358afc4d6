"""Ground truth: primality, sieving and frozen reference values.

Nothing here depends on the closed forms being tested, so these functions
can serve as independent oracles.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import gmpy2

from .errors import BudgetExceeded

SIEVE_LIMIT = 10**8

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
# the first twelve primes as bases decide every n below this bound
_DETERMINISTIC_BOUND = 318665857834031151167461
# extra pseudo-random rounds beyond the bound; error below 4^-EXTRA_ROUNDS
EXTRA_ROUNDS = 32


def _strong_probable_prime(n, a) -> bool:
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = gmpy2.powmod(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def lucas_lehmer_prime(p: int) -> bool:
    """Whether 2^p - 1 is prime."""
    if p == 2:
        return True
    if p < 2 or not is_prime(p):
        return False
    m = (gmpy2.mpz(1) << p) - 1
    s = gmpy2.mpz(4)
    for _ in range(p - 2):
        s = (s * s - 2) % m
    return s == 0


def pepin_prime(k: int) -> bool:
    """Whether the Fermat number 2^(2^k) + 1 is prime (k >= 1 uses base 3)."""
    if k == 0:
        return True
    n = (gmpy2.mpz(1) << (1 << k)) + 1
    return gmpy2.powmod(3, (n - 1) // 2, n) == n - 1


def _power_of_two_exponent(x: int):
    return x.bit_length() - 1 if x > 0 and x & (x - 1) == 0 else None


def is_prime(n: int) -> bool:
    """Exact below 3.18e23 (and for 2^p - 1, 2^(2^k) + 1); probabilistic above."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n < _DETERMINISTIC_BOUND:
        return all(_strong_probable_prime(n, a) for a in _SMALL_PRIMES)
    p = _power_of_two_exponent(n + 1)
    if p is not None:
        return lucas_lehmer_prime(p)
    m = _power_of_two_exponent(n - 1)
    if m is not None:
        k = _power_of_two_exponent(m)
        # 2^m + 1 with m not a power of two has a nontrivial factor
        return k is not None and pepin_prime(k)
    if not all(_strong_probable_prime(n, a) for a in _SMALL_PRIMES):
        return False
    rng = random.Random(n)
    return all(_strong_probable_prime(n, rng.randrange(2, n - 1)) for _ in range(EXTRA_ROUNDS))


def sieve(n: int) -> list:
    """All primes <= n."""
    if n > SIEVE_LIMIT:
        raise BudgetExceeded(f"sieve limit is {SIEVE_LIMIT}")
    return [i for i, f in enumerate(sieve_flags(n)) if f]


@lru_cache(maxsize=8)
def sieve_flags(n: int) -> bytes:
    """flags[i] == 1 iff i is prime, for 0 <= i <= n."""
    if n > SIEVE_LIMIT:
        raise BudgetExceeded(f"sieve limit is {SIEVE_LIMIT}")
    if n < 2:
        return bytes(max(n + 1, 0))
    flags = bytearray([1]) * (n + 1)
    flags[0] = flags[1] = 0
    i = 2
    while i * i <= n:
        if flags[i]:
            flags[i * i::i] = bytes(len(range(i * i, n + 1, i)))
        i += 1
    return bytes(flags)


@dataclass(frozen=True)
class FixtureSet:
    mersenne_primes_prefix: tuple
    fermat_primes: tuple
    twin_lower_prefix: tuple
    sophie_prefix: tuple
    s_values: tuple
    pell_x_values: tuple


@lru_cache(maxsize=1)
def fixtures() -> FixtureSet:
    raw = json.loads(resources.files("arithterm").joinpath("data/fixtures.json").read_text())
    return FixtureSet(**{k: tuple(v) for k, v in raw.items()})
