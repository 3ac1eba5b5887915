from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from msoexpand.catalog import sentences
from msoexpand.errors import FormulaError, ResourceError, TypeMismatchError
from msoexpand.formula import FiniteModel, Signature, eval_finite, parse
from msoexpand.types import (
    TypeTable,
    back_omega_power,
    compose_sum,
    implies_sentence,
    omega_power,
    reverse_type,
    type_of_finite,
    type_of_word,
)

S0 = Signature.standard(0)
S1 = Signature.standard(1)

short_words = st.lists(st.integers(0, 1), max_size=3).map(tuple)


def words(n, max_len):
    for length in range(max_len + 1):
        yield from itertools.product(range(1 << n), repeat=length)


def test_empty_type_is_identity(tt):
    e = type_of_finite((), 2, 1, tt)
    assert e == tt.empty(2, 1)
    for w in words(1, 2):
        t = type_of_finite(w, 2, 1, tt)
        assert compose_sum(e, t, tt) == t == compose_sum(t, e, tt)


def test_level_one_ignores_length(tt):
    a, aa, eps = (type_of_finite(w, 1, 0, tt) for w in [(0,), (0, 0), ()])
    assert a == aa != eps
    assert compose_sum(a, a, tt) == aa


def test_level_two_counts_to_two(tt):
    a, aa = type_of_finite((0,), 2, 0, tt), type_of_finite((0, 0), 2, 0, tt)
    assert a != aa
    two = parse("E x. E y. x < y", S0)
    assert implies_sentence(aa, two, S0, tt) and not implies_sentence(a, two, S0, tt)


def test_composition_matches_direct(tt):
    for u in words(1, 3):
        for v in words(1, 3):
            direct = type_of_finite(u + v, 2, 1, tt)
            assert compose_sum(type_of_finite(u, 2, 1, tt), type_of_finite(v, 2, 1, tt), tt) == direct


def test_fold_matches_direct(tt):
    for w in words(1, 5):
        assert type_of_word(w, 2, 1, tt) == type_of_finite(w, 2, 1, tt)


@settings(max_examples=40, deadline=None)
@given(short_words, short_words, short_words)
def test_composition_associative(u, v, w):
    tt = TypeTable()
    a, b, c = (type_of_word(x, 2, 1, tt) for x in (u, v, w))
    assert compose_sum(compose_sum(a, b, tt), c, tt) == compose_sum(a, compose_sum(b, c, tt), tt)


def test_omega_of_empty_is_empty(tt):
    e = tt.empty(2, 1)
    assert omega_power(e, tt) == e


def test_omega_laws(tt):
    for w in words(1, 3):
        if not w:
            continue
        t = type_of_word(w, 2, 1, tt)
        w_t = omega_power(t, tt)
        assert compose_sum(t, w_t, tt) == w_t
        assert omega_power(compose_sum(t, t, tt), tt) == w_t


def test_omega_has_no_greatest(tt):
    w = omega_power(type_of_word((0,), 2, 0, tt), tt)
    assert not implies_sentence(w, parse("E x. A y. y <= x", S0), S0, tt)
    assert implies_sentence(w, parse("E x. A y. x <= y", S0), S0, tt)
    assert implies_sentence(w, parse("A x. E y. x < y", S0), S0, tt)


def test_back_omega(tt):
    b = back_omega_power(type_of_word((0,), 2, 0, tt), tt)
    assert implies_sentence(b, parse("E x. A y. y <= x", S0), S0, tt)
    assert not implies_sentence(b, parse("E x. A y. x <= y", S0), S0, tt)


def test_reverse(tt):
    aba = type_of_finite((0, 1, 0), 2, 1, tt)
    assert reverse_type(aba, tt) == aba
    assert reverse_type(type_of_finite((0, 1), 2, 1, tt), tt) == type_of_finite((1, 0), 2, 1, tt)
    for u in words(1, 3):
        t = type_of_word(u, 2, 1, tt)
        assert reverse_type(reverse_type(t, tt), tt) == t
        assert reverse_type(t, tt) == type_of_finite(u[::-1], 2, 1, tt)


def test_reverse_anti_homomorphism(tt):
    for u in words(1, 2):
        for v in words(1, 2):
            s, t = type_of_word(u, 2, 1, tt), type_of_word(v, 2, 1, tt)
            assert reverse_type(compose_sum(s, t, tt), tt) == compose_sum(reverse_type(t, tt), reverse_type(s, tt), tt)


def test_entailment_matches_evaluator(tt):
    for sig in (S0, S1):
        cat = sentences(sig, 2)
        for w in words(sig.n, 4):
            t = type_of_word(w, 2, sig.width, tt)
            for f in cat:
                assert implies_sentence(t, f, sig, tt) == eval_finite(f, FiniteModel(w, sig)), (w, str(f))


def test_entailment_errors(tt):
    t = type_of_word((0,), 1, 0, tt)
    with pytest.raises(FormulaError):
        implies_sentence(t, parse("E x. A y. x <= y", S0), S0, tt)
    with pytest.raises(TypeMismatchError):
        implies_sentence(t, parse("E x. P1(x)", S1), S1, tt)


def test_caps():
    small = TypeTable(k_max=2, word_cap=3)
    with pytest.raises(ResourceError):
        type_of_finite((0,), 3, 0, small)
    with pytest.raises(ResourceError):
        type_of_finite((0,) * 4, 1, 0, small)


def test_downgrade_is_lower_level_type(tt):
    for w in words(1, 3):
        assert tt.downgrade(type_of_word(w, 2, 1, tt), 1) == type_of_word(w, 1, 1, tt)


def test_idempotent_power(tt):
    for w in words(1, 3):
        if w:
            e = tt.idempotent_power(type_of_word(w, 2, 1, tt))
            assert compose_sum(e, e, tt) == e


def test_associativity_on_realized_types(tt):
    realized = sorted({type_of_word(w, 2, 1, tt) for w in words(1, 3)}, key=lambda t: t.id)
    for a in realized:
        for b in realized:
            ab = compose_sum(a, b, tt)
            for c in realized:
                assert compose_sum(ab, c, tt) == compose_sum(a, compose_sum(b, c, tt), tt)
