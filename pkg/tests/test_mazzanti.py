import random

import pytest
from hypothesis import given, strategies as st

from arithterm import mazzanti
from arithterm.errors import BudgetExceeded, DomainError
from arithterm.expdio import (ExpPolynomial, SquareSystem, brute_count, const, expand_squares,
                              var)
from arithterm.mazzanti import (CountingInstance, build_M, build_M_direct, constant_block,
                                count_solutions, delta, geo_sum, geo_sum_direct, m_profile,
                                popcount)

x, y = var("x"), var("y")


def sq(l, r):
    return expand_squares(SquareSystem.build([(l, r)]))


@pytest.mark.parametrize("r, q, t, value", [
    (0, 2, 4, 15), (1, 2, 4, 34), (2, 3, 3, 39), (0, 1, 7, 7),
])
def test_geo_sum_examples(r, q, t, value):
    assert geo_sum(r, q, t) == value


def test_geo_sum_matches_direct_sum():
    for r in range(3):
        for q in range(1, 8):
            for t in range(1, 51):
                assert geo_sum(r, q, t) == geo_sum_direct(r, q, t)


@given(st.integers(0, 5), st.integers(1, 2**70), st.integers(1, 30))
def test_geo_sum_random(r, q, t):
    assert geo_sum(r, q, t) == geo_sum_direct(r, q, t)


@pytest.mark.parametrize("a, b, value, ones", [(0, 3, 63, 6), (5, 3, 28, 3), (1, 1, 2, 1)])
def test_delta(a, b, value, ones):
    assert delta(a, b) == value
    assert popcount(value) == ones


def test_delta_rejects_out_of_range():
    with pytest.raises(DomainError):
        delta(8, 3)


def test_delta_weight_law():
    for b in range(1, 13):
        for a in range(1 << b):
            assert popcount(delta(a, b)) == (2 * b if a == 0 else b)


@pytest.mark.parametrize("n, ones", [(13, 3), (0, 0), (2**100, 1)])
def test_popcount(n, ones):
    assert popcount(n) == ones


def test_constant_block_exact():
    for w in range(1, 7):
        for c0 in range(0, (1 << w) + 1):
            for t, k in ((1, 1), (2, 2), (3, 1)):
                constant_block(c0, k, t, w)


def test_build_M_examples():
    p = sq([x], [const(1)])
    M = build_M(CountingInstance(p, 3, 4))
    assert M == delta(1, 4) + (delta(0, 4) << 8) + (delta(1, 4) << 16)
    assert popcount(M) == 4 * 4
    zero = ExpPolynomial.build([], ("x",))
    M0 = build_M(CountingInstance(zero, 2, 3))
    assert M0 == 63 + 63 * 64
    assert mazzanti.count_from_M(M0, 1, 2, 3) == 2


@pytest.mark.parametrize("poly, t, w, count", [
    (sq([x], [const(1)]), 3, 4, 1),
    (sq([x, const(2)], [y]), 6, 8, 4),
    (sq([x, const(1)], []), 4, 6, 0),
])
def test_count_solutions_examples(poly, t, w, count):
    assert count_solutions(CountingInstance(poly, t, w)) == count
    assert brute_count(poly, t) == count


def test_build_M_budget():
    p = sq([x, const(2)], [y])
    with pytest.raises(BudgetExceeded):
        build_M(CountingInstance(p, 1000, 40), bit_budget=1 << 10)


def test_json_instance():
    ci = CountingInstance(sq([x, const(2)], [y]), 6, 8)
    assert CountingInstance.from_json(ci.to_json()) == ci


@given(st.integers(0, 2**32))
def test_build_M_matches_direct_sum(seed):
    ci = mazzanti.random_instance(random.Random(seed), 3, 5)
    assert build_M(ci) == build_M_direct(ci)


@given(st.integers(0, 2**32))
def test_count_matches_enumeration(seed):
    got, want = mazzanti.cross_check(mazzanti.random_instance(random.Random(seed), 3, 5))
    assert got == want


def test_choose_w_examples():
    assert mazzanti.choose_w(sq([x], [const(1)]), 3) == 4
    assert mazzanti.choose_w(ExpPolynomial.build([const(5)], ()), 9) == 3


def test_profile_of_a_square():
    prof = m_profile(sq([x], [const(1)]))
    assert prof.groups == {(2,): 1, (1,): 1}
    assert prof.constants == 1
