from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from msoexpand.catalog import sentences
from msoexpand.errors import MsoError
from msoexpand.formula import Signature, parse
from msoexpand.omega import OmegaPresentation, SearchBudget, lasso, pure, structure_type
from msoexpand.scattered import (
    BACK,
    FINITE,
    OMEGA,
    ZETA,
    BackOmega,
    ClassDecomposition,
    FiniteWord,
    PieceClass,
    SumPresentation,
    _merge,
    _mergeable,
    decide_class,
    decide_scattered,
    expand_scattered,
    generalized_sum_type,
    normalize_classes,
    select_case,
    tag_of,
)
from msoexpand.types import TypeTable
from msoexpand.zeta import BiLasso, bilasso, periodic, structure_type_zeta

S0 = Signature.standard(0)
S1 = Signature.standard(1)

COMPONENTS = {
    "a": FiniteWord((0,), S0),
    "ab": FiniteWord((0, 0), S0),
    "c": FiniteWord((0,), S0),
    "o": pure(S0),
    "b": BackOmega(pure(S0)),
    "z": periodic((0,), S0),
}


def summed(prefix, period=()):
    return SumPresentation(S0, COMPONENTS, tuple(prefix), tuple(period))


def tags(d):
    return [c.tag for c in d.prefix], [c.tag for c in d.period]


def test_finite_then_omega_merges():
    d = normalize_classes(summed(["ab", "o"]))
    assert tags(d) == ([OMEGA], [])
    assert d.prefix[0].presentation.head == (0, 0)


def test_back_finite_omega_is_zeta():
    d = normalize_classes(summed(["b", "c", "o"]))
    assert tags(d) == ([ZETA], [])
    assert isinstance(d.prefix[0].presentation, BiLasso)


def test_omega_then_finite_stays_apart():
    assert tags(normalize_classes(summed(["o", "c"]))) == ([OMEGA, FINITE], [])


def test_omega_index_of_finite_words():
    assert tags(normalize_classes(summed([], ["a"]))) == ([OMEGA], [])


def test_periodic_index_classes():
    assert tags(normalize_classes(summed([], ["b", "a", "o"]))) == ([], [ZETA])
    assert tags(normalize_classes(summed(["a"], ["o", "a"]))) == ([], [OMEGA])
    assert tags(normalize_classes(summed([], ["z", "a"]))) == ([], [ZETA, FINITE])


def test_finite_sum_rejected():
    with pytest.raises(MsoError):
        normalize_classes(summed(["a", "c"]))


def test_case_selection():
    def case(*classes):
        return select_case(ClassDecomposition(S1, [PieceClass(t, p) for t, p in classes]))
    assert case((OMEGA, pure(S1)), (ZETA, periodic((0, 1), S1))) == "1a"
    assert case((BACK, BackOmega(pure(S1)))) == "1b"
    assert case((ZETA, periodic((0, 1), S1))) == "2a"
    assert case((ZETA, bilasso((0,), (1,), (0,), S1))) == "2b"


def test_fold(tt, budget):
    d = ClassDecomposition(S1, [PieceClass(FINITE, FiniteWord((0,), S1)), PieceClass(FINITE, FiniteWord((1,), S1))])
    assert generalized_sum_type(d, 2, budget, tt) == tt.word((0, 1), 2, 1)


def test_collapse_to_naturals(tt, budget):
    d = normalize_classes(summed([], ["a"]))
    assert generalized_sum_type(d, 2, budget, tt) == structure_type(pure(S0), 2, budget, tt)


def test_sum_coherence(tt, budget):
    nat = structure_type(pure(S0), 2, budget, tt)
    zeta = structure_type_zeta(periodic((0,), S0), 2, budget, tt)
    for f in sentences(S0, 2):
        assert decide_scattered(summed([], ["a"]), f, budget, tt) == tt.holds(nat, f, S0)
        assert decide_scattered(summed(["b", "o"]), f, budget, tt) == tt.holds(zeta, f, S0)
    assert decide_scattered(summed([], ["a"]), parse("E x. A y. x <= y", S0), budget, tt)
    assert decide_scattered(summed(["b", "o"]), parse("~E x. A y. x <= y", S0), budget, tt)


def test_case_1a_uniform(tt, budget):
    r = expand_scattered(summed([], ["o"]), budget, tt)
    assert r.case == "1a"
    p = r.presentation
    assert p.period == (p.period[0],) and r.expanded[p.period[0]]
    sig = p.sig
    assert decide_scattered(p, parse("A x. E y. (x < y & H(y))", sig), budget, tt)
    assert decide_scattered(p, parse("(E x. H(x)) & (A x. (H(x) -> E y. (x < y & H(y))))", sig), budget, tt)


def test_case_1a_only_omega_classes(tt, budget):
    comps = {"o": pure(S1), "z": bilasso((0,), (1,), (0,), S1)}
    r = expand_scattered(SumPresentation(S1, comps, ("o", "z")), budget, tt)
    assert r.case == "1a"
    p = r.presentation
    has_h = parse("E x. H(x)", p.sig)
    verdicts = {name: decide_class(c, has_h, budget, tt) for name, c in p.components.items()}
    assert verdicts == r.expanded
    assert sorted(verdicts.values()) == [False, True]
    assert isinstance(p.components[p.prefix[0]], OmegaPresentation)


def test_case_2a(tt, budget):
    comps = {"z": periodic((0, 1), S1)}
    r = expand_scattered(SumPresentation(S1, comps, ("z", "z")), budget, tt)
    assert r.case == "2a"
    p = r.presentation
    assert len(set(p.prefix)) == 1  # identical classes share one expansion
    z = p.components[p.prefix[0]]
    h = 1 << p.sig.n
    assert any(z.letter(i) & h for i in range(0, 200))
    assert any(z.letter(i) & h for i in range(-200, 0))
    assert decide_scattered(p, parse("A x. E y. (x < y & H(y))", p.sig), budget, tt)


def test_case_2b(tt, budget):
    comps = {"z": bilasso((0,), (1,), (0,), S1)}
    r = expand_scattered(SumPresentation(S1, comps, ("z",)), budget, tt)
    assert r.case == "2b"
    p = r.presentation
    z = p.components[p.prefix[0]]
    assert not any(z.letter(i) >> p.sig.n for i in range(-100, 0))
    assert decide_scattered(p, parse("A x. (H(x) -> E y. (y < x & ~H(y)))", p.sig), budget, tt)


def test_signature_mismatch():
    with pytest.raises(ValueError):
        SumPresentation(S1, {"o": pure(S0)}, ("o",))
    with pytest.raises(ValueError):
        SumPresentation(S0, {"o": pure(S0)}, ("x",))


# -- normalization preserves the structure ------------------------------------

PIECES = {
    "f0": FiniteWord((0,), S1),
    "f1": FiniteWord((1, 0), S1),
    "o": pure(S1),
    "o1": lasso((1,), (0, 1), S1),
    "b": BackOmega(lasso((), (1,), S1)),
}


def raw_fold(p, k, budget, tt):
    """Type of the sum computed component by component, without merging."""
    def typed(c):
        if isinstance(c, FiniteWord):
            return tt.word(c.word, k, 1)
        if isinstance(c, BackOmega):
            return tt.reverse(structure_type(c.ray, k, budget, tt))
        return structure_type(c, k, budget, tt)
    out = tt.sum((typed(p.components[n]) for n in p.prefix), level=k, width=1)
    if p.period:
        out = tt.compose(out, tt.omega(tt.sum(typed(p.components[n]) for n in p.period)))
    return out


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(sorted(PIECES)), max_size=3),
       st.lists(st.sampled_from(sorted(PIECES)), min_size=1, max_size=3))
def test_normalization_preserves_type(prefix, period):
    tt = TypeTable()
    budget = SearchBudget()
    p = SumPresentation(S1, PIECES, tuple(prefix), tuple(period))
    d = normalize_classes(p)
    assert generalized_sum_type(d, 2, budget, tt) == raw_fold(p, 2, budget, tt)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.sampled_from(["f0", "f1"]), max_size=3),
       st.lists(st.sampled_from(["f0", "f1"]), min_size=1, max_size=3))
def test_finite_pieces_collapse_to_lasso(prefix, period):
    tt = TypeTable()
    budget = SearchBudget()
    p = SumPresentation(S1, PIECES, tuple(prefix), tuple(period))
    head = sum((PIECES[n].word for n in prefix), ())
    loop = sum((PIECES[n].word for n in period), ())
    for f in sentences(S1, 2):
        assert decide_scattered(p, f, budget, tt) == tt.holds(
            structure_type(lasso(head, loop, S1), 2, budget, tt), f, S1)


# -- order-independence of the merge rules ------------------------------------

MERGE_PIECES = {
    "f": FiniteWord((0,), S1),
    "g": FiniteWord((1, 0), S1),
    "o": lasso((1,), (0,), S1),
    "b": BackOmega(lasso((0,), (1,), S1)),
}


def merge_rightmost_first(items):
    items = list(items)
    changed = True
    while changed:
        changed = False
        for i in range(len(items) - 2, -1, -1):
            if _mergeable(items[i], items[i + 1]):
                items[i:i + 2] = [_merge(items[i], items[i + 1])]
                changed = True
                break
    return items


def test_normalization_confluence():
    for n in range(1, 6):
        for names in itertools.product(sorted(MERGE_PIECES), repeat=n):
            if set(names) <= {"f", "g"}:
                continue
            p = SumPresentation(S1, MERGE_PIECES, names)
            greedy = [c.key() for c in normalize_classes(p).prefix]
            items = [PieceClass(tag_of(MERGE_PIECES[x]), MERGE_PIECES[x]) for x in names]
            assert greedy == [c.key() for c in merge_rightmost_first(items)], names


def test_uniform_expansion_across_names(tt, budget):
    comps = {"o1": pure(S1), "o2": pure(S1), "w": FiniteWord((1,), S1)}
    r = expand_scattered(SumPresentation(S1, comps, ("w", "o1", "w", "o2")), budget, tt)
    # both classes are w + omega, presented under different component names
    first, second = r.presentation.prefix
    assert first == second and r.expanded[first]
