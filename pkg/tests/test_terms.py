import pytest
from hypothesis import given, strategies as st

from arithterm.errors import DivisionByZero, DomainError, ParseError, UnboundVariable
from arithterm.terms import (AbsDiff, Add, Binom, Const, DivFloor, Fact, Gcd, HW, Min, Mod,
                             Monus, Mul, Nu2, Pow, Pow2, Var, evaluate, expand_sugar,
                             free_vars, from_json, is_pure, marchenkov_pow, metrics, parse,
                             render, substitute, to_json)

n, x, y, a, b = (Var(s) for s in "nxyab")


@pytest.mark.parametrize("text, tree", [
    ("2^n - 1", Monus(Pow2(n), Const(1))),
    ("(3*fact(n)) % (n+1)", Mod(Mul(Const(3), Fact(n)), Add(n, Const(1)))),
    ("x ^ y", Pow(x, y)),
    ("min(a, b)", Min(a, b)),
    ("a - b - 1", Monus(Monus(a, b), Const(1))),
    ("2^2^x", Pow2(Pow2(x))),
])
def test_parse(text, tree):
    assert parse(text) == tree


@pytest.mark.parametrize("tree, text", [
    (Monus(Pow2(n), Const(1)), "2^n - 1"),
    (Const(0), "0"),
    (Min(a, b), "min(a, b)"),
])
def test_render(tree, text):
    assert render(tree) == text


def test_parse_error_position():
    with pytest.raises(ParseError) as err:
        parse("1 +\n  * 2")
    assert "2" in str(err.value)


@pytest.mark.parametrize("text", ["", "(1", "1 2", "foo(1)", "min(1)", "x $ y"])
def test_parse_rejects(text):
    with pytest.raises(ParseError):
        parse(text)


def test_huge_literal():
    big = 10**400 + 7
    assert evaluate(parse(str(big))) == big


@pytest.mark.parametrize("text, env, value", [
    ("3 - 5", {}, 0),
    ("2^(x) * x", {"x": 5}, 160),
    ("17 % 5", {}, 2),
    ("7 / 2", {}, 3),
    ("binom(10, 3)", {}, 120),
    ("binom(3, 10)", {}, 0),
    ("fact(0) + fact(5)", {}, 121),
    ("gcd(12, 18)", {}, 6),
    ("gcd(0, 7)", {}, 7),
    ("nu2(40)", {}, 3),
    ("hw(255)", {}, 8),
    ("absdiff(4, 9)", {}, 5),
    ("x ^ 0", {"x": 0}, 1),
])
def test_evaluate(text, env, value):
    assert evaluate(parse(text), env) == value


def test_evaluate_errors():
    with pytest.raises(DivisionByZero):
        evaluate(parse("x / y"), {"x": 7, "y": 0})
    with pytest.raises(DivisionByZero):
        evaluate(parse("x % 0"), {"x": 7})
    with pytest.raises(UnboundVariable):
        evaluate(parse("x + 1"), {})
    with pytest.raises(DomainError):
        evaluate(Nu2(Const(0)))


def test_json_round_trip():
    t = parse("binom(2^n, n) % (n*n + 1) - min(n, 3)")
    assert from_json(to_json(t)) == t


def test_free_vars_and_substitute():
    t = parse("x + y * x")
    assert free_vars(t) == {"x", "y"}
    assert evaluate(substitute(t, {"y": Const(3)}), {"x": 2}) == 8


def test_metrics():
    m = metrics(parse("2^n - 1"))
    assert m.node_count == 4
    assert m.histogram["monus"] == 1


@pytest.mark.parametrize("tree, env, value", [
    (Pow(a, b), {"a": 3, "b": 4}, 81),
    (Mod(a, b), {"a": 17, "b": 5}, 2),
    (AbsDiff(a, b), {"a": 4, "b": 9}, 5),
    (Min(a, b), {"a": 4, "b": 9}, 4),
    (Binom(a, b), {"a": 6, "b": 2}, 15),
    (Gcd(a, b), {"a": 6, "b": 4}, 2),
    (Nu2(a), {"a": 2}, 1),
    (Nu2(a), {"a": 3}, 0),
    (HW(a), {"a": 1}, 1),
    (Fact(a), {"a": 1}, 1),
])
def test_expand_sugar_examples(tree, env, value):
    pure = expand_sugar(tree)
    assert is_pure(pure)
    assert evaluate(tree, env) == value
    assert evaluate(pure, env, 1 << 26) == value


def test_marchenkov_shape():
    assert marchenkov_pow(a, b) == Mod(
        Pow2(Mul(Add(Mul(a, b), Add(a, Const(1))), b)),
        Monus(Pow2(Add(Mul(a, b), Add(a, Const(1)))), a))


# random syntax trees

LEAVES = st.one_of(st.integers(0, 50).map(Const), st.sampled_from("xyz").map(Var))


def _extend(children):
    binary = st.sampled_from([Add, Monus, Mul, DivFloor, Mod, Min, AbsDiff, Gcd, Binom, Pow])
    unary = st.sampled_from([Pow2, Fact, HW])
    return st.one_of(
        st.tuples(binary, children, children).map(lambda t: t[0](t[1], t[2])),
        st.tuples(unary, children).map(lambda t: t[0](t[1])),
    )


TREES = st.recursive(LEAVES, _extend, max_leaves=12)


@given(TREES)
def test_render_parse_round_trip(t):
    assert parse(render(t)) == t


@given(TREES)
def test_json_round_trip_random(t):
    assert from_json(to_json(t)) == t


SMALL = st.recursive(
    st.one_of(st.integers(0, 6).map(Const), st.sampled_from("xy").map(Var)),
    lambda c: st.tuples(st.sampled_from([Add, Monus, Mul, Mod, Min, AbsDiff]), c, c)
    .map(lambda t: t[0](t[1], t[2])),
    max_leaves=6)


@given(SMALL, st.integers(0, 6), st.integers(0, 6))
def test_expand_sugar_agrees(t, xv, yv):
    env = {"x": xv, "y": yv}
    try:
        want = evaluate(t, env)
    except DivisionByZero:
        return
    assert evaluate(expand_sugar(t), env, 1 << 20) == want
