import random

import pytest
from hypothesis import given, strategies as st

from arithterm.errors import BudgetExceeded, DomainError
from arithterm.expdio import (ExpPolynomial, SquareSystem, brute_count, choose_w, const,
                              eval_poly, expand_squares, expo, magnitude_bound, monomial,
                              nonneg_singlefold_transform, raw_monomial_count, satisfies,
                              symbolic_w, var)

x, y, a = var("x"), var("y"), var("a")


def square(l, r):
    return SquareSystem.build([(l, r)])


def test_binomial_square():
    p = expand_squares(square([a], [expo("k")]))
    assert len(p.monomials) == 3
    assert sorted(m.coeff for m in p.monomials) == [-2, 1, 1]
    # squaring 2^k gives base 4
    assert any(m.factor("k") == (4, 0) for m in p.monomials)


@pytest.mark.parametrize("l, r, env, value", [
    ([x], [const(1)], {"x": 1}, 0),
    ([x, const(2)], [y], {"x": 0, "y": 2}, 0),
    ([x, const(2)], [y], {"x": 0, "y": 0}, 4),
])
def test_eval_poly(l, r, env, value):
    assert eval_poly(expand_squares(square(l, r)), env) == value


@pytest.mark.parametrize("l, r, t, count", [
    ([x, const(2)], [y], 6, 4),
    ([x], [const(1)], 3, 1),
    ([x, const(1)], [], 4, 0),
])
def test_brute_count(l, r, t, count):
    assert brute_count(expand_squares(square(l, r)), t) == count


def test_brute_count_budget():
    p = expand_squares(square([x, const(2)], [y]))
    with pytest.raises(BudgetExceeded):
        brute_count(p, 10**4, point_budget=1000)


def test_json_round_trip():
    s = SquareSystem.build([([x, expo("y", 3)], [const(5)]), ([y], [x])])
    assert SquareSystem.from_json(s.to_json()) == s
    p = expand_squares(s)
    assert ExpPolynomial.from_json(p.to_json()) == p


def test_negative_sides_rejected():
    with pytest.raises(DomainError):
        SquareSystem.build([([var("x", -1)], [])])


def test_transform_two_monomials():
    s = nonneg_singlefold_transform([x], [y])
    assert len(s.squares) == 3
    assert raw_monomial_count(s) == 3 * 2 + 3
    assert s.unknowns == ("x", "y", "y_1", "y_2")


def test_transform_three_monomials():
    s = nonneg_singlefold_transform([var("x", 2)], [y, const(1)])
    assert len(s.squares) == 4
    assert raw_monomial_count(s) == 12
    # solutions of 2x = y + 1 in [0,8)^2 correspond to solutions of the system
    want = sum(1 for xv in range(8) for yv in range(8) if 2 * xv == yv + 1)
    poly = expand_squares(s)
    bounds = {"y_1": 15, "y_2": 8, "y_3": 2}
    assert brute_count(poly, 8, bounds) == want


def test_transform_empty():
    s = nonneg_singlefold_transform([], [], unknowns=["x"])
    assert len(s.squares) == 1
    assert brute_count(expand_squares(s), 5) == 5


def test_transform_rejects_negative():
    with pytest.raises(DomainError):
        nonneg_singlefold_transform([var("x", -1)], [])


@st.composite
def small_square_systems(draw):
    names = ["x", "y"]

    def side():
        out = []
        for _ in range(draw(st.integers(0, 2))):
            n = draw(st.sampled_from(names + [None]))
            c = draw(st.integers(1, 3))
            if n is None:
                out.append(const(c))
            elif draw(st.booleans()):
                out.append(expo(n, draw(st.integers(1, 3)), c))
            else:
                out.append(var(n, c))
        return out
    squares = [(side(), side()) for _ in range(draw(st.integers(1, 3)))]
    return SquareSystem.build(squares, names)


@given(small_square_systems(), st.integers(0, 4), st.integers(0, 4))
def test_expansion_is_a_sum_of_squares(s, xv, yv):
    env = {"x": xv, "y": yv}
    v = eval_poly(expand_squares(s), env)
    assert v >= 0
    assert (v == 0) == satisfies(s, env)


@given(small_square_systems())
def test_canonical_idempotent(s):
    p = expand_squares(s)
    assert ExpPolynomial.build(p.monomials, p.unknowns) == p


@st.composite
def nonneg_monomials(draw):
    out = []
    for _ in range(draw(st.integers(0, 2))):
        n = draw(st.sampled_from(["x", "y", None]))
        c = draw(st.integers(1, 2))
        out.append(const(c) if n is None else var(n, c))
    return out


@given(nonneg_monomials(), nonneg_monomials(), st.integers(1, 5))
def test_transform_keeps_solution_count(pos, neg, t):
    s = nonneg_singlefold_transform(pos, neg, unknowns=["x", "y"])
    want = 0
    for xv in range(t):
        for yv in range(t):
            env = {"x": xv, "y": yv}
            lhs = sum(m.coeff * (env[m.names().pop()] if m.names() else 1) for m in pos)
            rhs = sum(m.coeff * (env[m.names().pop()] if m.names() else 1) for m in neg)
            want += lhs == rhs
    # y_i ranges over [0, max m_i]
    bounds = {f"y_{i + 1}": m.coeff * (t - 1 if m.names() else 1) + 1
              for i, m in enumerate(pos + neg)}
    assert brute_count(expand_squares(s), t, bounds) == want


def test_choose_w():
    p = expand_squares(square([x], [const(1)]))
    assert choose_w(p, 3) == 4
    assert magnitude_bound(p, 3) == 9
    assert choose_w(ExpPolynomial.build([const(5)], ()), 7) == 3


def test_symbolic_w_bounds_every_cube():
    rng = random.Random(3)
    p = expand_squares(SquareSystem.build([([x, expo("y", 3)], [var("y", 2)]),
                                           ([monomial(1, {"x": (2, 1)})], [y])]))
    bound = symbolic_w(p)
    for t in range(1, 9):
        for _ in range(50):
            env = {"x": rng.randrange(t), "y": rng.randrange(t)}
            assert 0 <= eval_poly(p, env) < 1 << bound(t)
