"""Labelled orders indexed by the integers.

Every presentation is handled as two omega-rays cut at an origin: the
right ray reads positions ``c, c+1, ...`` and the left ray reads
``c-1, c-2, ...`` (so it is stored reversed).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .errors import FormulaError, ResourceError, UnsupportedPresentationError
from .formula import Formula, Signature
from .omega import (
    OmegaPresentation,
    SearchBudget,
    Source,
    SparseSet,
    _check_sentence,
    expand,
    lasso,
    segment_type,
    structure_type,
)
from .types import KType, TypeTable


def _sig(sig: Signature | int) -> Signature:
    return Signature.standard(sig) if isinstance(sig, int) else sig


def primitive_root(word: Sequence[int]) -> tuple[int, ...]:
    word = tuple(word)
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word[:d] * (n // d) == word:
            return word[:d]
    return word


class ZetaPresentation:
    sig: Signature

    @property
    def width(self) -> int:
        return self.sig.width

    def letter(self, i: int) -> int:
        raise NotImplementedError

    def letters(self, lo: int, hi: int) -> tuple[int, ...]:
        return tuple(self.letter(i) for i in range(lo, hi))

    def rays(self) -> tuple[OmegaPresentation, OmegaPresentation, int]:
        """``(left ray reversed, right ray, origin)``."""
        raise NotImplementedError

    def key(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, ZetaPresentation) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


@dataclass(frozen=True, eq=False)
class BiLasso(ZetaPresentation):
    """``...uL uL v uR uR...`` with position 0 on the first letter of ``v``
    (of ``uR`` when ``v`` is empty)."""

    left: tuple[int, ...]
    middle: tuple[int, ...]
    right: tuple[int, ...]
    sig: Signature = Signature()

    def __post_init__(self):
        if not self.left or not self.right:
            raise ValueError("both periodic parts of a bi-lasso must be nonempty")
        limit = 1 << self.sig.width
        if any(not 0 <= a < limit for a in self.left + self.middle + self.right):
            raise ValueError("letter outside the alphabet")

    def letter(self, i: int) -> int:
        if i < 0:
            return self.left[i % len(self.left)]
        if i < len(self.middle):
            return self.middle[i]
        return self.right[(i - len(self.middle)) % len(self.right)]

    def rays(self):
        return (lasso((), self.left[::-1], self.sig),
                lasso(self.middle, self.right, self.sig), 0)

    def key(self):
        return ("bilasso", self.sig, self.left, self.middle, self.right)


@dataclass(frozen=True, eq=False)
class Periodic(ZetaPresentation):
    """``p`` repeated in both directions; position 0 is ``p[phase]``."""

    word: tuple[int, ...]
    phase: int = 0
    sig: Signature = Signature()

    def __post_init__(self):
        if not self.word:
            raise ValueError("periodic word must be nonempty")
        limit = 1 << self.sig.width
        if any(not 0 <= a < limit for a in self.word):
            raise ValueError("letter outside the alphabet")

    def rotated(self) -> tuple[int, ...]:
        r = self.phase % len(self.word)
        return self.word[r:] + self.word[:r]

    def letter(self, i: int) -> int:
        return self.word[(i + self.phase) % len(self.word)]

    def rays(self):
        rot = self.rotated()
        return lasso((), rot[::-1], self.sig), lasso((), rot, self.sig), 0

    def key(self):
        return ("periodic", self.sig, self.rotated())


@dataclass(frozen=True, eq=False)
class GeneratorZ(ZetaPresentation):
    """Two omega-rays glued at ``origin``: ``letter(i)`` is ``right(i - origin)``
    for ``i >= origin`` and ``left(origin - 1 - i)`` otherwise."""

    left: OmegaPresentation
    right: OmegaPresentation
    origin: int = 0

    def __post_init__(self):
        if self.left.sig != self.right.sig:
            raise ValueError("rays over different signatures")

    @property
    def sig(self) -> Signature:
        return self.right.sig

    def letter(self, i: int) -> int:
        if i >= self.origin:
            return self.right.letter(i - self.origin)
        return self.left.letter(self.origin - 1 - i)

    def rays(self):
        return self.left, self.right, self.origin

    def key(self):
        return ("generator", self.left.key(), self.right.key(), self.origin)


def periodic(word: Sequence[int], sig: Signature | int = 0, phase: int = 0) -> Periodic:
    return Periodic(tuple(word), phase, _sig(sig))


def bilasso(left: Sequence[int], middle: Sequence[int], right: Sequence[int],
            sig: Signature | int = 0) -> BiLasso:
    return BiLasso(tuple(left), tuple(middle), tuple(right), _sig(sig))


# ---------------------------------------------------------------------------
# Recurrence


@dataclass(frozen=True)
class RecurrenceVerdict:
    recurrent: bool
    defect: int | None = None

    def __str__(self):
        return "RECURRENT" if self.recurrent else f"NONRECURRENT c={self.defect}"


def classify_recurrence(p: ZetaPresentation) -> RecurrenceVerdict:
    """Recurrent exactly when the word is ``q`` repeated in both directions.

    For a bi-lasso, with ``P`` the primitive period of the left part, the
    first ``j >= 0`` where ``w[j] != w[j - P]`` is the defect.  Checking
    ``|v| + P + |uR|`` positions is enough: past ``|v| + P`` both sides are
    inside the right periodic part.
    """
    if isinstance(p, Periodic):
        return RecurrenceVerdict(True)
    if not isinstance(p, BiLasso):
        raise UnsupportedPresentationError("recurrence is only decided for bi-lasso and periodic words")
    P = len(primitive_root(p.left))
    for j in range(len(p.middle) + P + len(p.right)):
        if p.letter(j) != p.letter(j - P):
            return RecurrenceVerdict(False, j)
    return RecurrenceVerdict(True)


@dataclass(frozen=True)
class Occurrence:
    found: bool
    exact: bool
    position: int | None = None

    def __bool__(self):
        return self.found


def occurs(p: ZetaPresentation, factor: Sequence[int], horizon: int = 1000) -> Occurrence:
    """Whether ``factor`` occurs; exact for bi-lassos and periodic words."""
    factor = tuple(factor)
    n = len(factor)
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if n == 0:
        return Occurrence(True, True, 0)
    if isinstance(p, Periodic):
        window, exact = range(0, len(p.word)), True
    elif isinstance(p, BiLasso):
        window, exact = range(-(len(p.left) + n), len(p.middle) + len(p.right) + 1), True
    else:
        window, exact = range(-horizon, horizon - n + 1), False
    for j in window:
        if all(p.letter(j + i) == factor[i] for i in range(n)):
            return Occurrence(True, True, j)
    return Occurrence(False, exact)


# ---------------------------------------------------------------------------
# Expansions


def ray_from(p: ZetaPresentation, c: int) -> OmegaPresentation:
    """The omega-ray of positions ``c, c+1, ...``."""
    left, right, origin = p.rays()
    if c >= origin:
        return right.drop(c - origin)
    return right.prepend(p.letters(c, origin))


def left_ray_before(p: ZetaPresentation, c: int) -> OmegaPresentation:
    """Positions ``c-1, c-2, ...`` read as an omega-ray."""
    left, right, origin = p.rays()
    if c <= origin:
        return left.drop(origin - c)
    return left.prepend(p.letters(origin, c)[::-1])


def expand_nonrecurrent(p: ZetaPresentation, c: int, b: SearchBudget, tt: TypeTable,
                        K: int = 2, level: int | None = None) -> GeneratorZ:
    """Empty new predicate left of ``c``; the omega-line expansion on ``[c, oo)``."""
    sig = p.sig.expanded()
    right = expand(ray_from(p, c), b, tt, K, level)
    left = left_ray_before(p, c).with_signature(sig)
    return GeneratorZ(left, right, c)


class PlacementSet(SparseSet):
    """Positions of a ray where the new bit is set by greedy placements.

    Round ``r`` lists, in length-lexicographic order, every word of length
    ``<= r + 1`` over the expanded alphabet whose projection occurs.  Each
    listed word is placed at the least position after the previous
    placement where its projection matches the ray.
    """

    kind = "placement"

    def __init__(self, ray: OmegaPresentation, vocabulary: "Vocabulary", reverse: bool):
        super().__init__()
        self.ray = ray
        self.vocabulary = vocabulary
        self.reverse = reverse
        self.placements: list[tuple[int, int, tuple[int, ...]]] = []  # (round, start, word)
        self._rounds: list[int] = [0]
        self._iter = self._place()

    def key(self):
        return ("placement", self.ray.key(), self.vocabulary.key(), self.reverse)

    def spec(self):
        return "placement"

    def _place(self) -> Iterator[tuple[int, int, tuple[int, ...]]]:
        nxt = 0
        width = self.ray.width
        mask = (1 << width) - 1
        for r in itertools.count():
            for u in self.vocabulary.round(r):
                if self.reverse:
                    u = u[::-1]
                proj = tuple(a & mask for a in u)
                a = self._match(nxt, proj)
                self.placements.append((r, a, u))
                nxt = a + len(u)
                yield r, a, u
            self._rounds.append(nxt)

    def _match(self, start: int, proj: tuple[int, ...]) -> int:
        ray = self.ray
        limit = start + len(ray.head) + len(ray.period) + len(proj) + 1
        for a in range(start, limit):
            if all(ray.background(a + i) == proj[i] for i in range(len(proj))):
                return a
        raise ResourceError(f"projection {proj} does not occur in the ray")

    def placement(self, m: int) -> tuple[int, int, tuple[int, ...]]:
        while len(self.placements) <= m:
            next(self._iter)
        return self.placements[m]

    def _generate(self):
        width = self.ray.width
        for m in itertools.count():
            _, a, u = self.placement(m)
            for i, letter in enumerate(u):
                if letter >> width & 1:
                    yield a + i

    def round_start(self, r: int) -> int:
        while len(self._rounds) <= r:
            next(self._iter)
        return self._rounds[r]

    def boundaries(self) -> Iterator[int]:
        for r in itertools.count(1):
            yield self.round_start(r)


@dataclass
class Vocabulary:
    """Words over the expanded alphabet whose projection occurs in a word."""

    base: ZetaPresentation
    _by_length: dict = field(default_factory=dict)

    def key(self):
        return self.base.key()

    def of_length(self, n: int) -> list[tuple[int, ...]]:
        found = self._by_length.get(n)
        if found is None:
            width = self.base.width
            letters = range(1 << (width + 1))
            mask = (1 << width) - 1
            found = [
                u for u in itertools.product(letters, repeat=n)
                if occurs(self.base, tuple(a & mask for a in u))
            ]
            self._by_length[n] = found
        return found

    def round(self, r: int) -> Iterator[tuple[int, ...]]:
        for n in range(1, r + 2):
            yield from self.of_length(n)


def expand_recurrent(p: ZetaPresentation, b: SearchBudget | None = None) -> GeneratorZ:
    """Decorate a recurrent word so that every decorated factor whose
    projection occurs appears in every prefix and every suffix."""
    if isinstance(p, GeneratorZ):
        raise UnsupportedPresentationError("recurrent expansion needs a bi-lasso or periodic word")
    verdict = classify_recurrence(p)
    if not verdict.recurrent:
        raise ValueError("word is not recurrent")
    sig = p.sig.expanded()
    vocab = Vocabulary(p)
    left, right, origin = p.rays()
    bit = sig.n
    right_set = PlacementSet(right, vocab, reverse=False)
    left_set = PlacementSet(left, vocab, reverse=True)
    new_right = right.with_signature(sig).add_source(Source(bit, right_set))
    new_left = left.with_signature(sig).add_source(Source(bit, left_set))
    return GeneratorZ(new_left, new_right, origin)


# ---------------------------------------------------------------------------
# Types


def structure_type_zeta(p: ZetaPresentation, k: int, b: SearchBudget, tt: TypeTable) -> KType:
    left, right, _ = p.rays()
    lt = tt.reverse(structure_type(left, k, b, tt))
    return tt.compose(lt, structure_type(right, k, b, tt))


def decide_zeta(p: ZetaPresentation, f: Formula, b: SearchBudget, tt: TypeTable) -> bool:
    _check_sentence(f, p.sig, p.width, tt.k_max)
    return tt.holds(structure_type_zeta(p, max(f.qd, 1), b, tt), f, p.sig)


def indistinguishable_zeta(p: ZetaPresentation, a: int, b_pos: int, k: int,
                           b: SearchBudget, tt: TypeTable) -> bool:
    """Equal k-types of ``(-oo, a)`` and ``(-oo, b)`` and of ``[a, oo)`` and ``[b, oo)``."""
    if a == b_pos:
        return True

    def before(x):
        return tt.reverse(structure_type(left_ray_before(p, x), k, b, tt))

    def after(x):
        return structure_type(ray_from(p, x), k, b, tt)

    return before(a) == before(b_pos) and after(a) == after(b_pos)
