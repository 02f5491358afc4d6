import random

import pytest
from hypothesis import given, strategies as st

from arithterm import sequences
from arithterm.errors import BudgetExceeded, DomainError, ValidityCheckFailed
from arithterm.sequences import (CONSTANT_ONE, FIBONACCI, PELL_X, CRecSpec, crec_eval,
                                 crec_values, extract_divmod_term, lehmer_s,
                                 lehmer_s_term_eval, pell_x_term_eval)
from arithterm.terms import evaluate


def test_pell_prefix():
    assert [crec_eval(PELL_X, n) for n in range(8)] == [1, 2, 7, 26, 97, 362, 1351, 5042]


@pytest.mark.parametrize("spec, n, value", [(FIBONACCI, 5, 5), (CONSTANT_ONE, 9, 1)])
def test_crec_eval(spec, n, value):
    assert crec_eval(spec, n) == value


def test_spec_validation():
    with pytest.raises(DomainError):
        CRecSpec((1,), (2, 1))
    with pytest.raises(DomainError):
        CRecSpec((1, 1), (1, 1))


def test_spec_json():
    spec = CRecSpec.from_json({"A": ["1", "-2"], "B": ["1", "-4", "1"], "c": "11"})
    assert spec == PELL_X
    assert CRecSpec.from_json(spec.to_json()) == spec


def test_extracted_pell_term():
    term = extract_divmod_term(PELL_X, 11).term
    vals = crec_values(PELL_X, 51)
    assert evaluate(term, {"n": 2}) == 7
    for n in range(1, 51):
        assert evaluate(term, {"n": n}) == vals[n]


def test_extracted_fibonacci_term():
    ex = extract_divmod_term(FIBONACCI, 8)
    vals = crec_values(FIBONACCI, 51)
    for n in range(1, 51):
        assert evaluate(ex.term, {"n": n}) == vals[n]


def test_extracted_constant_term():
    ex = extract_divmod_term(CONSTANT_ONE, 8)
    assert evaluate(ex.term, {"n": 3}) == 1


def test_minimal_base_is_reported():
    ex = extract_divmod_term(CRecSpec((1,), (1, -3)))
    assert ex.validity.ok and ex.validity.c >= 8
    vals = crec_values(CRecSpec((1,), (1, -3)), 40)
    for n in range(ex.validity.valid_from, 40):
        assert evaluate(ex.term, {"n": n}) == vals[n]


def test_invalid_base_rejected():
    # 3^n grows faster than 2^n, so base 2 is not admissible
    with pytest.raises(ValidityCheckFailed):
        extract_divmod_term(CRecSpec((1,), (1, -3)), 2)


def test_negative_sequence_rejected():
    with pytest.raises(ValidityCheckFailed):
        extract_divmod_term(CRecSpec((1,), (1, 1)), 8)


@pytest.mark.parametrize("n, value", [(1, 2), (4, 97), (8, 18817)])
def test_pell_closed_form(n, value):
    assert pell_x_term_eval(n) == value


def test_pell_closed_form_range():
    vals = crec_values(PELL_X, 301)
    assert all(pell_x_term_eval(n) == vals[n] for n in range(1, 301))


def test_pell_closed_form_rejects_zero():
    with pytest.raises(DomainError):
        pell_x_term_eval(0)


def test_pell_doubling():
    vals = crec_values(PELL_X, 201)
    for n in range(101):
        assert vals[2 * n] == 2 * vals[n] ** 2 - 1


@pytest.mark.parametrize("n, value", [(4, 37634), (6, 2005956546822746114)])
def test_lehmer(n, value):
    assert lehmer_s(n) == value


def test_lehmer_modular():
    assert lehmer_s(12, 2**13 - 1) == 0
    rng = random.Random(5)
    for n in range(1, 21):
        p = rng.randrange(2, 10**6)
        assert lehmer_s(n, p) == lehmer_s(n) % p


@pytest.mark.parametrize("n, value", [(1, 4), (2, 14), (5, 1416317954)])
def test_lehmer_closed_form(n, value):
    assert lehmer_s_term_eval(n) == value


def test_lehmer_closed_form_range():
    for n in range(1, 9):
        assert lehmer_s_term_eval(n) == lehmer_s(n)
    with pytest.raises(BudgetExceeded):
        lehmer_s_term_eval(9)


@given(st.lists(st.integers(0, 3), min_size=1, max_size=2), st.integers(1, 3))
def test_extraction_matches_recurrence(a_coeffs, growth):
    # B = 1 - growth*z has positive coefficients growth^n times A's
    spec = CRecSpec(tuple(a_coeffs[:1]), (1, -growth))
    try:
        ex = extract_divmod_term(spec)
    except ValidityCheckFailed:
        return
    vals = crec_values(spec, 30)
    for n in range(ex.validity.valid_from, 30):
        assert evaluate(ex.term, {"n": n}) == vals[n]
