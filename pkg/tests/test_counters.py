import math

import pytest

from arithterm import counters
from arithterm.errors import BudgetExceeded, DomainError
from arithterm.expdio import eval_poly, expand_squares, raw_monomial_count, satisfies
from arithterm.mazzanti import m_profile
from arithterm.oracles import is_prime, sieve_flags
from arithterm.terms import FactorialScheme, evaluate, free_vars


def test_R_shape():
    R = counters.build_R()
    assert R.k_vars == 19
    assert set(R.unknowns) == set("kvabcdefghijKlmpxyz")
    assert len(R.system.squares) == 16
    assert raw_monomial_count(R.system) == 48
    assert R.t(0) == 121
    assert R.offset == 1
    assert (R.w_bound.alpha, R.w_bound.beta) == (36, 6)


def test_R_is_its_chain():
    assert counters.mersenne_determinism().ok


@pytest.mark.parametrize("k, x, z", [(1, 7, 1), (3, 18817, 607)])
def test_mersenne_witness(k, x, z):
    w = counters.mersenne_witness(k)
    assert w.values["x"] == x and w.values["z"] == z
    assert w.satisfied and w.complete
    R = counters.build_R()
    assert eval_poly(expand_squares(R.system), w.assignment()) == 0


def test_mersenne_witness_none_for_composites():
    assert counters.mersenne_witness(9) is None
    for k in (2, 4, 6, 7, 8, 10):
        assert counters.mersenne_witness(k) is None


def test_mersenne_witness_limits():
    with pytest.raises(BudgetExceeded):
        counters.mersenne_witness(12)
    with pytest.raises(DomainError):
        counters.mersenne_witness(0)


def test_mersenne_witnesses_inside_cube_for_k_at_least_3():
    R = counters.build_R()
    for k in (3, 5, 11):
        w = counters.mersenne_witness(k)
        assert w.satisfied
        assert counters.coordinates_below(w, R.t(k, 1 << 26))


def test_mersenne_witness_k1_reaches_cube_edge():
    # g = 11^(f + 2a) = 11^8 = t(1): the k = 1 witness is not strictly inside
    R = counters.build_R()
    w = counters.mersenne_witness(1)
    t = R.t(1)
    assert w.values["g"] == t == 11**8
    assert not counters.coordinates_below(w, t)


@pytest.mark.parametrize("p, prime", [(2, True), (3, True), (11, False), (13, True)])
def test_lucas_lehmer(p, prime):
    assert counters.lucas_lehmer_test(p) is prime


@pytest.mark.parametrize("n, count", [(0, 1), (5, 4), (11, 5)])
def test_mersenne_count_oracle(n, count):
    assert counters.mersenne_count_oracle(n) == count


def test_mersenne_oracle_matches_primality():
    for n in range(0, 30):
        assert counters.mersenne_count_oracle(n) == sum(
            is_prime(2 ** (k + 2) - 1) for k in range(n + 1))


def test_S_shape():
    S = counters.build_S()
    assert S.k_vars == 7
    assert len(S.system.squares) == 6
    assert len(expand_squares(S.system).monomials) == 17
    assert S.t(0) == 1728
    assert S.offset == 0


def test_S_profile_as_measured():
    prof = m_profile(expand_squares(counters.build_S().system)).with_constants()
    assert prof == {(2, 2): 2, (2,): 3, (1,): 1, (1, 1, 1): 2, (): 9}


@pytest.mark.parametrize("g", [0, 2, 42])
def test_fermat_witness(g):
    w = counters.fermat_witness(g)
    assert w.satisfied
    assert satisfies(counters.build_S().system, w.assignment())


def test_fermat_witness_zero_values():
    w = counters.fermat_witness(0)
    assert (w.values["c"], w.values["a"], w.values["b"]) == (144, 72, 29)
    assert counters.fermat_witness(1) is None


@pytest.mark.parametrize("g, result", [(0, True), (1, False), (42, True), (10922, True)])
def test_jones(g, result):
    assert counters.jones_test(g) is result


def test_jones_matches_pepin_and_primality():
    jones = {6 * g + 5 for g in range(11001) if counters.jones_test(g)}
    pepin = {2**m + 1 for m in range(2, 17) if counters.pepin_test(m)}
    direct = {2**m + 1 for m in range(2, 17) if is_prime(2**m + 1)}
    assert jones == pepin == direct == {5, 17, 257, 65537}


def test_pepin_base_twelve_misses_three():
    assert counters.pepin_test(2)
    assert not counters.pepin_test(1)


@pytest.mark.parametrize("n, count", [(0, 1), (2, 2), (10922, 4)])
def test_fermat_count_oracle(n, count):
    assert counters.fermat_count_oracle(n) == count


@pytest.mark.parametrize("k, result", [(1, True), (3, True), (5, False)])
def test_clement(k, result):
    assert counters.clement_test(k) is result


def test_clement_matches_sieve():
    flags = sieve_flags(3010)
    for k in range(3000):
        assert counters.clement_test(k) == bool(flags[k + 2] and flags[k + 4])


@pytest.mark.parametrize("n, count", [(10, 2), (30, 5), (2, 0)])
def test_twin_count_oracle(n, count):
    assert counters.twin_count_oracle(n) == count


@pytest.mark.parametrize("p, result", [(2, True), (5, True), (7, False), (0, False), (1, False)])
def test_sophie_germain(p, result):
    assert counters.sg_test(p) is result


def test_sophie_criteria_agree():
    flags = sieve_flags(6010)
    for p in range(2, 3000):
        assert counters.sg_rotondo(p) == counters.sg_wilson(p) == bool(flags[p] and flags[2 * p + 1])


@pytest.mark.parametrize("scheme", list(FactorialScheme))
def test_twin_system_is_its_chain(scheme):
    spec = counters.build_twin_system(scheme)
    assert spec.offset == 0
    assert counters.audit_chain(spec.system, spec.chain).ok
    for l, r in spec.system.squares:
        assert all(m.coeff >= 0 for m in l + r)


def test_twin_witness_small():
    w = counters.twin_witness(1)
    assert w.complete and w.satisfied
    assert w.values["f"] == 2 and w.values["b"] == 1
    assert counters.twin_witness(2) is None
    assert counters.twin_witness(5) is None


def test_twin_witness_partial():
    w = counters.twin_witness(3)
    assert w is not None and not w.complete
    assert w.values["f"] == math.factorial(4)
    assert w.values["b"] == (4 * 24 + 9) // (5 * 7)


def test_twin_determinism():
    report = counters.twin_determinism(10)
    assert report.ok
    assert [k for k, r in report.per_k.items() if r["solution"]] == [1, 3, 9]


def test_twin_t_and_w_are_terms_in_n():
    spec = counters.build_twin_system(FactorialScheme.MINIMAL)
    assert free_vars(spec.t_of_n) == free_vars(spec.w_of_n) == {"n"}
    assert (spec.w_bound.alpha, spec.w_bound.beta) == (6, 11)
    # the bound is far beyond any budget already at n = 0
    with pytest.raises(BudgetExceeded):
        spec.t(0, 1 << 24)


def test_count_via_term_toy():
    rep = counters.count_via_term("toy", 0)
    assert rep.count == 4


@pytest.mark.parametrize("family", ["mersenne", "fermat"])
def test_count_via_term_is_symbolic(family):
    rep = counters.count_via_term(family, 0)
    assert rep.count is None and rep.oracle == 1
    spec = counters.family_spec(family)
    t, w = spec.t(0), spec.w(0)
    want = math.log10(2 * w * t**spec.k_vars)
    assert rep.symbolic["log10_M_bits"] == pytest.approx(want, rel=1e-9)


def test_power_digits():
    for base, e, mult, add in ((11, 2, 36, 6), (12, 3, 22, 27), (7, 500, 1, 0)):
        exact = len(str(mult * base**e + add))
        assert counters.power_digits(base, e, mult, add) == exact
        assert counters.power_digits(base, e, mult, add, exact_limit=0) == exact


def test_t_of_n_terms():
    assert evaluate(counters.build_R().t_of_n, {"n": 0}) == 121
    assert evaluate(counters.build_S().w_of_n, {"n": 0}) == 22 * 1728 + 27


def test_witness_json():
    w = counters.mersenne_witness(3)
    obj = w.to_json()
    assert obj["values"]["z"] == "607" and obj["satisfied"]
