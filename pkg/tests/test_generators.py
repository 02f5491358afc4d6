import math

import pytest

from arithterm import generators
from arithterm.errors import BudgetExceeded, DomainError
from arithterm.generators import (factorial_mod, factorial_semantic, factorial_term_eval,
                                  fermat_gen, mersenne_gen, sophie_gen, twin_gen, wilson_gen,
                                  z_exceptions)
from arithterm.oracles import is_prime, sieve_flags
from arithterm.terms import FactorialScheme


def test_factorials():
    assert factorial_semantic(5) == 120
    assert factorial_mod(6, 7) == 6
    assert factorial_mod(3, 4) == 2
    with pytest.raises(BudgetExceeded):
        factorial_semantic(5001)


def test_factorial_mod_matches_direct():
    for n in range(0, 60):
        for m in range(1, 40):
            assert factorial_mod(n, m) == math.factorial(n) % m


@pytest.mark.parametrize("n, scheme, value", [
    (0, FactorialScheme.POW8SQ, 1),
    (7, FactorialScheme.POW8SQ, 5040),
    (12, FactorialScheme.MINIMAL, 479001600),
])
def test_factorial_term(n, scheme, value):
    assert factorial_term_eval(n, scheme) == value


@pytest.mark.parametrize("scheme", list(FactorialScheme))
def test_factorial_term_range(scheme):
    for n in range(0, 10):
        assert factorial_term_eval(n, scheme) == math.factorial(n)


@pytest.mark.parametrize("c, n, value", [(2, 4, 5), (2, 3, 2), (3, 6, 7), (3, 4, 5), (3, 3, 5)])
def test_wilson(c, n, value):
    assert wilson_gen(c, n) == value


def test_z_has_a_single_exception():
    # z(3) = 3 + (3 * 3!) mod 4 = 5 although 4 is composite
    assert z_exceptions(2000) == [3]


def test_t_never_deviates():
    for n in range(1, 2000):
        assert wilson_gen(2, n) == (n + 1 if is_prime(n + 1) else 2)


@pytest.mark.parametrize("n, variant, value", [(2, 1, 7), (3, 1, 3), (4, 2, 31)])
def test_mersenne(n, variant, value):
    assert mersenne_gen(n, variant) == value


def test_mersenne_image():
    assert {mersenne_gen(n) for n in range(13)} == {3, 7, 31, 127, 8191}
    with pytest.raises(BudgetExceeded):
        mersenne_gen(21)


@pytest.mark.parametrize("n, variant, value", [(2, 1, 17), (1, 1, 3), (4, 2, 65537)])
def test_fermat(n, variant, value):
    assert fermat_gen(n, variant) == value


def test_fermat_image():
    assert {fermat_gen(n) for n in range(15)} <= {3, 5, 17, 257, 65537}
    assert {fermat_gen(n, 2) for n in range(5)} <= {3, 5, 17, 257, 65537}


@pytest.mark.parametrize("n, pair", [(0, (3, 5)), (8, (11, 13)), (4, (3, 5))])
def test_twin(n, pair):
    assert twin_gen(n) == pair


@pytest.mark.parametrize("n, value", [(1, 2), (2, 3), (6, 2)])
def test_sophie(n, value):
    assert sophie_gen(n) == value


def test_twin_and_sophie_images():
    flags = sieve_flags(5000)
    for n in range(2000):
        p, q = twin_gen(n)
        assert flags[p] and flags[q] and q == p + 2
        g = sophie_gen(n)
        assert flags[g] and flags[2 * g + 1]


@pytest.mark.parametrize("family, variant, limit", [
    ("mersenne", 1, 6), ("mersenne", 2, 5), ("fermat", 1, 4), ("fermat", 2, 3),
    ("twin", 1, 40), ("sophie", 1, 40),
])
def test_term_matches_semantic(family, variant, limit):
    for n in range(limit):
        assert generators.generate(family, n, variant, "term") == \
            generators.generate(family, n, variant, "semantic")


def test_bad_arguments():
    with pytest.raises(DomainError):
        wilson_gen(5, 3)
    with pytest.raises(DomainError):
        generators.generate("perfect", 3)
