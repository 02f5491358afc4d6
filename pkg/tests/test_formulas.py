import math

import pytest
from hypothesis import given, strategies as st

from arithterm import formulas
from arithterm.errors import DomainError
from arithterm.terms import FactorialScheme


@given(st.integers(1, 60), st.integers(0, 60))
def test_binom(a, b):
    assert formulas.binom_formula(a, b) == math.comb(a, b)


@given(st.integers(0, 60), st.integers(0, 60))
def test_binom_wider_window(a, b):
    assert formulas.binom_formula(a, b, width=a + 1) == math.comb(a, b)


def test_binom_width_a_misses_zero():
    # with 2^0 = 1 the window is empty
    assert formulas.binom_formula(0, 0) == 0
    assert formulas.binom_formula(0, 0, width=1) == 1


def test_binom_literal_agrees():
    for a in range(1, 16):
        for b in range(0, a + 2):
            assert formulas.binom_formula_literal(a, b) == math.comb(a, b)


@given(st.integers(1, 60), st.integers(1, 60))
def test_gcd(a, b):
    assert formulas.gcd_formula(a, b) == math.gcd(a, b)


def test_gcd_literal_small():
    assert formulas.gcd_formula_literal(1, 1) == 1
    for a in range(1, 9):
        for b in range(1, 9):
            assert formulas.gcd_formula_literal(a, b) == math.gcd(a, b)


def test_gcd_needs_positive():
    with pytest.raises(DomainError):
        formulas.gcd_formula(0, 3)


@given(st.integers(1, 10**6))
def test_nu2(n):
    assert formulas.nu2_formula(n) == (n & -n).bit_length() - 1


def test_nu2_literal():
    for n in range(1, 65):
        assert formulas.nu2_formula_literal(n) == (n & -n).bit_length() - 1


@given(st.integers(1, 10**5))
def test_hamming_weight(n):
    assert formulas.hw_via_term(n) == bin(n).count("1")


@pytest.mark.parametrize("n, value", [(13, 3), (64, 1), (1, 1)])
def test_hamming_weight_examples(n, value):
    assert formulas.hw_via_term(n) == value


@given(st.integers(0, 30), st.integers(0, 12))
def test_marchenkov_pow(a, b):
    assert formulas.marchenkov_pow_value(a, b) == a ** b


@given(st.integers(0, 1000), st.integers(0, 1000))
def test_min(a, b):
    assert formulas.min_formula(a, b) == min(a, b)


@pytest.mark.parametrize("scheme", list(FactorialScheme))
def test_factorial_formula(scheme):
    for n in range(0, 10):
        assert formulas.factorial_formula(n, scheme) == math.factorial(n)
