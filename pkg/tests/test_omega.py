from __future__ import annotations

import math

import pytest
from hypothesis import given, settings, strategies as st

from msoexpand.catalog import sentences
from msoexpand.errors import ResourceError, UnknownPredicateError
from msoexpand.formula import Signature, parse
from msoexpand.omega import (
    FactorialSet,
    PowerSet,
    SearchBudget,
    build_uniform_homog,
    decide,
    er_agreement,
    expand,
    expanded_type,
    expansion_chain,
    generator,
    indistinguishability_check,
    lasso,
    pure,
    segment_type,
    structure_type,
)
from msoexpand.types import TypeTable

S0 = Signature.standard(0)
S1 = Signature.standard(1)

NAT = pure(0)
FAC = generator(S1, ["factorial"])
UPBITS = generator(S1, ["upbits:000:10"])


def brute_factorials(limit):
    return sorted({math.factorial(n) for n in range(1, 20) if math.factorial(n) < limit})


def test_sparse_sets():
    fac = FactorialSet()
    assert fac.between(0, 1000) == brute_factorials(1000)
    assert 720 in fac and 721 not in fac
    assert PowerSet(3).between(0, 100) == [1, 3, 9, 27, 81]
    with pytest.raises(ValueError):
        PowerSet(1)


def test_generator_letters():
    assert [i for i in range(800) if FAC.letter(i)] == brute_factorials(800)
    assert [i for i in range(12) if UPBITS.letter(i)] == [3, 5, 7, 9, 11]
    fin = generator(S1, ["finite:1,4"])
    assert [i for i in range(20) if fin.letter(i)] == [1, 4]


def test_prepend_and_drop():
    p = FAC.prepend((1, 0))
    assert [p.letter(i) for i in range(10)] == [1, 0] + [FAC.letter(i) for i in range(8)]
    d = FAC.drop(5)
    assert [d.letter(i) for i in range(30)] == [FAC.letter(i) for i in range(5, 35)]
    lz = lasso((1,), (0, 1), S1).drop(4)
    assert lz.letters(0, 6) == lasso((1,), (0, 1), S1).letters(4, 10)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 40), st.integers(0, 40), st.integers(1, 2))
def test_segment_type_matches_direct(lo, length, level):
    tt = TypeTable()
    for p in (FAC, UPBITS):
        hi = lo + length
        assert segment_type(p, lo, hi, level, tt) == tt.word(p.letters(lo, hi), level, p.width)


def test_pure_level_one_chain(tt, budget):
    hs = build_uniform_homog(NAT, 1, budget, tt)
    assert hs.level_elements(1, 6) == [0, 1, 2, 3, 4, 5]
    assert hs.idempotents[1] == tt.word((0,), 1, 0)


def test_factorial_chain_verifies(tt, budget):
    hs = build_uniform_homog(FAC, 2, budget, tt, check=5)
    assert hs.verify(5, tt) == []
    h1 = hs.level_elements(1, 5)
    # independent check at level 1: fold the letters of consecutive segments
    seg = {tt.word(FAC.letters(a, b), 1, 1) for a, b in zip(h1[1:], h1[2:])}
    assert seg == {hs.idempotents[1]}


def test_zero_horizon(tt):
    with pytest.raises(ResourceError):
        build_uniform_homog(NAT, 1, SearchBudget(horizon=0), tt)


def test_chain_determinism(budget):
    runs = [build_uniform_homog(FAC, 2, budget, TypeTable()).elements(5) for _ in range(2)]
    assert runs[0] == runs[1]


@pytest.mark.parametrize("p,text,expected", [
    (NAT, "E x. A y. x <= y", True),
    (NAT, "E x. A y. y <= x", False),
    (NAT, "A x. E y. x < y", True),
    (FAC, "A x. E y. (x < y & P1(y))", True),
    (FAC, "E x. (P1(x) & A y. (P1(y) -> x <= y))", True),
    (UPBITS, "(A x. E y. (x < y & P1(y))) & (A x. E y. (x < y & ~P1(y)))", True),
    (UPBITS, "E x. A y. (P1(y) -> y <= x)", False),
])
def test_known_decisions(tt, budget, p, text, expected):
    assert decide(p, parse(text, p.sig), budget, tt) is expected


def test_fast_path_matches_homog(tt, budget):
    p = lasso((0, 1), (1, 0), S1)
    for k in (1, 2):
        assert structure_type(p, k, budget, tt, route="fast") == structure_type(p, k, budget, tt, route="homog")


def test_generator_matches_equivalent_lasso(tt, budget):
    # the same ultimately periodic word given two ways
    as_lasso = lasso((0, 0, 0), (1, 0), S1)
    for f in sentences(S1, 2):
        assert decide(UPBITS, f, budget, tt) == decide(as_lasso, f, budget, tt), str(f)


def test_decide_rejects_foreign_predicate(tt, budget):
    with pytest.raises(UnknownPredicateError):
        decide(NAT, parse("E x. P1(x)", S1), budget, tt)


def test_expansion_basics(tt, budget):
    for p in (NAT, FAC):
        q = expand(p, budget, tt)
        sig = q.sig
        hs, base = expansion_chain(q)
        assert base == p
        h = [i for i in range(60) if q.letter(i) >> sig.n & 1]
        assert h == [x for x in hs.elements(40) if x < 60]
        assert all(q.letter(i) & ~(1 << sig.n) == p.letter(i) for i in range(60))
        assert decide(q, parse("A x. E y. (x < y & H(y))", sig), budget, tt)
        assert decide(q, parse("E x. (H(x) & A y. (H(y) -> x <= y))", sig), budget, tt)


def test_expanded_type_routes_agree(tt, budget):
    for p in (NAT, FAC):
        q = expand(p, budget, tt)
        for k in (1, 2):
            direct = expanded_type(q, k, tt, budget, "direct")
            assert direct == expanded_type(q, k, tt, budget, "syntactic")
            assert direct == expanded_type(q, k, tt, budget, "generic")
        assert er_agreement(q, 1, sentences(q.sig, 1), tt) == []
        t = expanded_type(q, 2, tt, budget)
        assert tt.holds(t, parse("A x. E y. (x < y & H(y))", q.sig), q.sig)


def test_expanded_type_level_limit(tt, budget):
    q = expand(NAT, budget, tt)
    with pytest.raises(ResourceError):
        expanded_type(q, 3, tt, budget)


def test_indistinguishability(tt, budget):
    assert indistinguishability_check(FAC, 7, 7, 2, tt, budget)
    assert not indistinguishability_check(FAC, 1, 4, 1, tt, budget)
    q = expand(NAT, budget, tt)
    hs, _ = expansion_chain(q)
    a, b = hs.element(4), hs.element(5)
    assert indistinguishability_check(NAT, a, b, 2, tt, budget)
