"""Ordered sums of words along a finite or omega index.

The sum is cut into maximal pieces in which any two points are finitely
far apart.  Each piece is a finite word, an omega-ray, a backwards ray or a
two-sided word; the pieces are then expanded uniformly and the type of the
whole sum is the fold of the piece types along the index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

from .errors import FormulaError, MsoError, UnsupportedPresentationError
from .formula import Formula, Signature
from .omega import (
    OmegaPresentation,
    SearchBudget,
    _check_sentence,
    expand,
    lasso,
    structure_type,
)
from .types import KType, TypeTable
from .zeta import (
    BiLasso,
    GeneratorZ,
    Periodic,
    ZetaPresentation,
    classify_recurrence,
    expand_nonrecurrent,
    expand_recurrent,
    structure_type_zeta,
)


@dataclass(frozen=True)
class FiniteWord:
    word: tuple[int, ...]
    sig: Signature = Signature()

    def key(self):
        return ("finite", self.sig, self.word)


@dataclass(frozen=True, eq=False)
class BackOmega:
    """A backwards ray: ``ray`` read from right to left."""

    ray: OmegaPresentation

    @property
    def sig(self) -> Signature:
        return self.ray.sig

    def key(self):
        return ("back", self.ray.key())

    def __eq__(self, other):
        return isinstance(other, BackOmega) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


Component = Union[FiniteWord, OmegaPresentation, BackOmega, ZetaPresentation]

FINITE, OMEGA, BACK, ZETA = "finite", "omega", "back", "zeta"


def tag_of(c: Component) -> str:
    if isinstance(c, FiniteWord):
        return FINITE
    if isinstance(c, OmegaPresentation):
        return OMEGA
    if isinstance(c, BackOmega):
        return BACK
    if isinstance(c, ZetaPresentation):
        return ZETA
    raise TypeError(f"not a component: {c!r}")


@dataclass(frozen=True)
class SumPresentation:
    """``prefix`` followed, when ``period`` is nonempty, by ``period`` repeated omega times."""

    sig: Signature
    components: Mapping[str, Component]
    prefix: tuple[str, ...]
    period: tuple[str, ...] = ()

    def __post_init__(self):
        for name in self.prefix + self.period:
            if name not in self.components:
                raise ValueError(f"index refers to unknown component {name!r}")
        for name, c in self.components.items():
            if c.sig != self.sig:
                raise ValueError(f"component {name!r} has another signature")


@dataclass(frozen=True)
class PieceClass:
    tag: str
    presentation: Component

    def key(self):
        return (self.tag, self.presentation.key())


@dataclass
class ClassDecomposition:
    sig: Signature
    prefix: list[PieceClass]
    period: list[PieceClass] = field(default_factory=list)

    def classes(self) -> list[PieceClass]:
        return self.prefix + self.period


# ---------------------------------------------------------------------------
# Normalization


def _mergeable(a: PieceClass, b: PieceClass) -> bool:
    return (a.tag, b.tag) in {(FINITE, FINITE), (FINITE, OMEGA), (BACK, FINITE), (BACK, OMEGA)}


def _merge(a: PieceClass, b: PieceClass) -> PieceClass:
    x, y = a.presentation, b.presentation
    if (a.tag, b.tag) == (FINITE, FINITE):
        return PieceClass(FINITE, FiniteWord(x.word + y.word, x.sig))
    if (a.tag, b.tag) == (FINITE, OMEGA):
        return PieceClass(OMEGA, y.prepend(x.word))
    if (a.tag, b.tag) == (BACK, FINITE):
        return PieceClass(BACK, BackOmega(x.ray.prepend(y.word[::-1])))
    if (a.tag, b.tag) == (BACK, OMEGA):
        left, right = x.ray, y
        if left.is_lasso and right.is_lasso:
            z = BiLasso(left.period[::-1], left.head[::-1] + right.head, right.period, y.sig)
        else:
            z = GeneratorZ(left, right, 0)
        return PieceClass(ZETA, z)
    raise ValueError("pieces cannot be merged")


def _normalize_run(items: Sequence[PieceClass]) -> list[tuple[PieceClass, int]]:
    """Greedy merge of a finite run; returns classes with their first index."""
    stack: list[tuple[PieceClass, int]] = []
    for i, c in enumerate(items):
        stack.append((c, i))
        while len(stack) >= 2 and _mergeable(stack[-2][0], stack[-1][0]):
            (a, start), (b, _) = stack[-2], stack[-1]
            stack[-2:] = [(_merge(a, b), start)]
    return stack


def normalize_classes(p: SumPresentation) -> ClassDecomposition:
    items = [PieceClass(tag_of(c), c) for c in (p.components[n] for n in p.prefix)]
    if not p.period:
        classes = [c for c, _ in _normalize_run(items)]
        if all(c.tag == FINITE for c in classes):
            raise MsoError("a finite sum of finite words is not an infinite structure")
        return ClassDecomposition(p.sig, classes)
    period = [PieceClass(tag_of(c), c) for c in (p.components[n] for n in p.period)]
    if all(c.tag == FINITE for c in period):
        word = tuple(a for c in period for a in c.presentation.word)
        if not word:
            raise MsoError("an omega sum of empty words is empty")
        tail = PieceClass(OMEGA, lasso((), word, p.sig))
        return ClassDecomposition(p.sig, [c for c, _ in _normalize_run(items + [tail])])
    P, Q = len(items), len(period)
    run = _normalize_run(items + period * 4)
    starts = [i for _, i in run]
    s = next(i for i in starts if i >= P + Q)
    first = [(c, i - s) for c, i in run if s <= i < s + Q]
    second = [(c, i - s - Q) for c, i in run if s + Q <= i < s + 2 * Q]
    if [(c.key(), i) for c, i in first] != [(c.key(), i) for c, i in second]:
        raise MsoError("class boundaries of the periodic index are not periodic")
    prefix = [c for c, i in run if i < s]
    period = [c for c, _ in first]
    # x + (y x)^omega = (x y)^omega: fold a redundant prefix back into the period
    while prefix and prefix[-1].key() == period[-1].key():
        prefix.pop()
        period = period[-1:] + period[:-1]
    return ClassDecomposition(p.sig, prefix, period)


def select_case(d: ClassDecomposition) -> str:
    tags = [c.tag for c in d.classes()]
    if OMEGA in tags:
        return "1a"
    if BACK in tags:
        return "1b"
    if ZETA not in tags:
        raise MsoError("no infinite class")
    if all(classify_recurrence(c.presentation).recurrent for c in d.classes() if c.tag == ZETA):
        return "2a"
    return "2b"


# ---------------------------------------------------------------------------
# Expansion


def widen(c: Component, sig: Signature) -> Component:
    """The same component over ``sig`` with the new predicate empty."""
    if isinstance(c, FiniteWord):
        return FiniteWord(c.word, sig)
    if isinstance(c, OmegaPresentation):
        return c.with_signature(sig)
    if isinstance(c, BackOmega):
        return BackOmega(c.ray.with_signature(sig))
    if isinstance(c, BiLasso):
        return BiLasso(c.left, c.middle, c.right, sig)
    if isinstance(c, Periodic):
        return Periodic(c.word, c.phase, sig)
    if isinstance(c, GeneratorZ):
        return GeneratorZ(c.left.with_signature(sig), c.right.with_signature(sig), c.origin)
    raise TypeError(f"not a component: {c!r}")


@dataclass
class ExpansionResult:
    case: str
    presentation: SumPresentation
    expanded: dict[str, bool]  # component name -> received a nonempty new predicate


def expand_scattered(p: SumPresentation, b: SearchBudget, tt: TypeTable) -> ExpansionResult:
    d = normalize_classes(p)
    case = select_case(d)
    sig = p.sig.expanded()
    memo: dict[tuple, tuple[str, Component, bool]] = {}

    def expand_class(c: PieceClass) -> str:
        key = c.key()
        found = memo.get(key)
        if found is not None:
            return found[0]
        x = c.presentation
        out, grown = None, True
        if case == "1a" and c.tag == OMEGA:
            out = expand(x, b, tt)
        elif case == "1b" and c.tag == BACK:
            out = BackOmega(expand(x.ray, b, tt))
        elif case == "2a" and c.tag == ZETA:
            out = expand_recurrent(x, b)
        elif case == "2b" and c.tag == ZETA:
            verdict = classify_recurrence(x)
            if not verdict.recurrent:
                out = expand_nonrecurrent(x, verdict.defect, b, tt)
        if out is None:
            out, grown = widen(x, sig), False
        name = f"c{len(memo)}"
        memo[key] = (name, out, grown)
        return name

    prefix = tuple(expand_class(c) for c in d.prefix)
    period = tuple(expand_class(c) for c in d.period)
    components = {name: comp for name, comp, _ in memo.values()}
    grown = {name: g for name, _, g in memo.values()}
    return ExpansionResult(case, SumPresentation(sig, components, prefix, period), grown)


# ---------------------------------------------------------------------------
# Types and decisions


def class_type(c: PieceClass, k: int, b: SearchBudget, tt: TypeTable) -> KType:
    x = c.presentation
    if c.tag == FINITE:
        return tt.word(x.word, k, x.sig.width)
    if c.tag == OMEGA:
        return structure_type(x, k, b, tt)
    if c.tag == BACK:
        return tt.reverse(structure_type(x.ray, k, b, tt))
    return structure_type_zeta(x, k, b, tt)


def generalized_sum_type(d: ClassDecomposition, k: int, b: SearchBudget, tt: TypeTable) -> KType:
    """Fold the class types along the index; an omega period contributes an omega power."""
    memo: dict[tuple, KType] = {}

    def typed(c):
        key = c.key()
        if key not in memo:
            memo[key] = class_type(c, k, b, tt)
        return memo[key]

    out = tt.sum((typed(c) for c in d.prefix), level=k, width=d.sig.width)
    if d.period:
        out = tt.compose(out, tt.omega(tt.sum(typed(c) for c in d.period)))
    return out


def decide_scattered(p: SumPresentation, f: Formula, b: SearchBudget, tt: TypeTable) -> bool:
    _check_sentence(f, p.sig, p.sig.width, tt.k_max)
    d = normalize_classes(p)
    return tt.holds(generalized_sum_type(d, max(f.qd, 1), b, tt), f, p.sig)


def decide_class(c: Component, f: Formula, b: SearchBudget, tt: TypeTable) -> bool:
    """Decide a sentence on one component on its own."""
    _check_sentence(f, c.sig, c.sig.width, tt.k_max)
    return tt.holds(class_type(PieceClass(tag_of(c), c), max(f.qd, 1), b, tt), f, c.sig)
