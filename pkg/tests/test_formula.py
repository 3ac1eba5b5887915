from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from msoexpand.catalog import sentences
from msoexpand.errors import FormulaError, FormulaSyntaxError, UnboundVariableError, UnknownPredicateError
from msoexpand.formula import (
    And,
    Eq,
    Exists,
    Forall,
    Le,
    Lt,
    Pred,
    Signature,
    FiniteModel,
    alpha_equivalent,
    eval_finite,
    parse,
    quantifier_depth,
    relativize,
    to_text,
    transform_er,
    word_from_bits,
    word_to_bits,
)

S0 = Signature.standard(0)
S1 = Signature.standard(1)
SH = Signature.standard(0, expansion=True)


def words(n, max_len):
    for length in range(max_len + 1):
        yield from itertools.product(range(1 << n), repeat=length)


def test_parse_order_sentence():
    assert parse("E x. A y. x <= y", S0) == Exists("x", Forall("y", Le("x", "y")))


def test_parse_predicate_atom():
    assert parse("E x. P1(x)", S1) == Exists("x", Pred("P1", "x"))


def test_unknown_predicate():
    with pytest.raises(UnknownPredicateError):
        parse("E x. Q(x)", S1)


@pytest.mark.parametrize("text", ["E x. (x", "E x. x <", "A x.", "x < y )", "E2 x. x = x"])
def test_syntax_errors(text):
    with pytest.raises(FormulaSyntaxError):
        parse(text, S1)


def test_unbound_variable_rejected():
    with pytest.raises(UnboundVariableError):
        parse("x < y", S0)
    assert parse("x < y", S0, free=("x", "y")) == Lt("x", "y")


@pytest.mark.parametrize("text,qd", [
    ("E x. A y. x <= y", 2),
    ("P1(x)", 0),
    ("E2 X. E x. (x in X & A y. x <= y)", 3),
    ("(E x. P1(x)) & (A y. E z. y < z)", 2),
])
def test_quantifier_depth(text, qd):
    free = ("x",) if text == "P1(x)" else ()
    assert quantifier_depth(parse(text, S1, free=free)) == qd


def test_round_trip_through_text():
    for f in sentences(S1, 2):
        assert parse(to_text(f), S1) == f


def test_alpha_equivalence():
    assert alpha_equivalent(parse("E x. A y. x <= y", S0), parse("E u. A v. u <= v", S0))
    assert not alpha_equivalent(parse("E x. A y. x <= y", S0), parse("E x. A y. y <= x", S0))


def test_relativize_shape():
    f = parse("E z. P1(z)", S1)
    assert relativize(f, "x", "y") == Exists("z", And(And(Le("x", "z"), Lt("z", "y")), Pred("P1", "z")))
    atom = parse("x < y", S1, free=("x", "y"))
    assert relativize(atom, "x", "y") == atom


def test_relativize_rejects_capture():
    with pytest.raises(FormulaError):
        relativize(parse("E x. P1(x)", S1), "x", "y")


def test_relativize_matches_subword():
    f = parse("E z. P1(z)", S1)
    word = word_from_bits("010", 1)
    # [1, 3) is the suffix from 1, so the upper side stays open
    g = relativize(f, "x", None)
    assert eval_finite(g, FiniteModel(word, S1, {"x": 1}))
    assert eval_finite(f, FiniteModel(word[1:3], S1))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 1), max_size=5), st.data())
def test_relativize_is_restriction(word, data):
    word = tuple(word)
    lo = data.draw(st.integers(0, len(word)))
    hi = data.draw(st.integers(lo, len(word)))
    body = [f for f in sentences(S1, 2) if f.qd <= 2]
    f = data.draw(st.sampled_from(body))
    g = relativize(f, "lo", "hi")
    # one padding letter so that lo and hi always name positions
    whole = FiniteModel(word + (0,), S1, {"lo": lo, "hi": hi})
    assert eval_finite(g, whole) == eval_finite(f, FiniteModel(word[lo:hi], S1))


def test_transform_er_shape():
    f = parse("E z. H(z)", SH)
    assert transform_er(f, SH) == Exists("x", And(Forall("y", Le("x", "y")), Exists("z", Eq("z", "x"))))


def test_transform_er_depth_bound():
    for f in sentences(SH, 2):
        g = transform_er(f, SH)
        assert g.qd <= f.qd + 2
        assert g.qd == max(2, f.qd + 1)


def test_transform_er_on_marked_words():
    # H holds exactly at the first position; the rewrite must not need H.
    for length in range(1, 5):
        marked = (1,) + (0,) * (length - 1)
        for f in sentences(SH, 2):
            g = transform_er(f, SH)
            assert eval_finite(f, FiniteModel(marked, SH)) == eval_finite(g, FiniteModel((0,) * length, SH))


def test_transform_er_needs_expansion():
    with pytest.raises(FormulaError):
        transform_er(parse("E x. P1(x)", S1), S1)


def test_eval_examples():
    assert eval_finite(parse("E x. P1(x)", S1), FiniteModel(word_from_bits("010", 1), S1))
    assert eval_finite(parse("E2 X. A x. x in X", S0), FiniteModel((), S0))
    assert eval_finite(parse("E x. A y. y <= x", S0), FiniteModel((0, 0), S0))
    assert not eval_finite(parse("E x. A y. y <= x", S0), FiniteModel((), S0))


def test_eval_unassigned():
    with pytest.raises(UnboundVariableError):
        eval_finite(parse("x < y", S0, free=("x", "y")), FiniteModel((0, 0), S0, {"x": 0}))


def test_bit_words():
    assert word_from_bits("...", 0) == (0, 0, 0)
    assert word_from_bits("1001", 2) == (1, 2)
    for w in words(2, 3):
        assert word_from_bits(word_to_bits(w, 2), 2) == w
    with pytest.raises(ValueError):
        word_from_bits("101", 2)


def test_depth_under_prefixing():
    for f in sentences(S1, 2):
        assert Exists("q", f).qd == f.qd + 1
        assert relativize(f, "lo", "hi").qd == f.qd


def test_relativize_exhaustive():  # words up to length 5
    cat = sentences(S1, 2)
    for word in words(1, 5):
        padded = word + (0,)
        for lo in range(len(word) + 1):
            for hi in range(lo, len(word) + 1):
                env = FiniteModel(padded, S1, {"lo": lo, "hi": hi})
                sub = FiniteModel(word[lo:hi], S1)
                for f in cat:
                    assert eval_finite(relativize(f, "lo", "hi"), env) == eval_finite(f, sub)


def test_transform_er_exhaustive_with_predicate():
    sig = Signature.standard(1, expansion=True)
    h = 1 << sig.n
    cat = sentences(sig, 2)
    for word in words(1, 5):
        if not word:
            continue
        marked = (word[0] | h,) + word[1:]
        for f in cat:
            g = transform_er(f, sig)
            assert eval_finite(f, FiniteModel(marked, sig)) == eval_finite(g, FiniteModel(word, sig)), str(f)
