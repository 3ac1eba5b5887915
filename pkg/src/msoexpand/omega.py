"""Labelled orders indexed by the naturals.

A presentation is an ultimately periodic *background* word plus a list of
sparse infinite *sources*, each switching one letter bit on at the
positions of an increasing set (factorials, powers, the diagonal of a
homogeneous chain, ...).  Types of such words are computed over a *grid*:
the positions ``e`` and ``e + 1`` of every source element, so that every
grid gap is either one marked letter or a stretch of background.  The
sequence of gap types is ultimately periodic, which is what drives both
the homogeneous-set construction and the type computation.
"""

from __future__ import annotations

import bisect
import heapq
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .errors import FormulaError, ResourceError, TypeMismatchError
from .formula import Forall, Formula, Le, Signature, free_variables, transform_er
from .types import KType, TypeTable

DEFAULT_HORIZON = 10**80
DEFAULT_STEPS = 96
DEFAULT_EVENTS = 20000
EVENT_CAP = 10**6


@dataclass(frozen=True)
class SearchBudget:
    """``horizon`` bounds the positions a search may inspect; ``steps`` bounds
    the number of grid gaps examined when looking for periodicity and
    ``events`` the number of marked positions folded while doing so."""

    horizon: int = DEFAULT_HORIZON
    steps: int = DEFAULT_STEPS
    events: int = DEFAULT_EVENTS

    def __post_init__(self):
        if self.horizon < 0 or self.steps <= 0 or self.events <= 0:
            raise ValueError("budget caps must be a non-negative horizon and positive counts")


# ---------------------------------------------------------------------------
# Sparse sets


class SparseSet:
    """An infinite increasing set of naturals, enumerated lazily."""

    kind = "abstract"

    def __init__(self):
        self._cache: list[int] = []
        self._gen: Iterator[int] | None = None

    def _generate(self) -> Iterator[int]:
        raise NotImplementedError

    def key(self) -> tuple:
        raise NotImplementedError

    def spec(self) -> str:
        raise NotImplementedError

    def _extend_to(self, bound: int) -> None:
        """Cache every element ``<= bound`` plus the first one beyond it."""
        if self._gen is None:
            self._gen = self._generate()
        while not self._cache or self._cache[-1] <= bound:
            if len(self._cache) >= EVENT_CAP:
                raise ResourceError(f"more than {EVENT_CAP} elements of {self.spec()} requested")
            self._cache.append(next(self._gen))

    def element(self, j: int) -> int:
        if self._gen is None:
            self._gen = self._generate()
        while len(self._cache) <= j:
            self._cache.append(next(self._gen))
        return self._cache[j]

    def __iter__(self) -> Iterator[int]:
        j = 0
        while True:
            yield self.element(j)
            j += 1

    def __contains__(self, x: int) -> bool:
        self._extend_to(x)
        i = bisect.bisect_left(self._cache, x)
        return self._cache[i] == x

    def between(self, lo: int, hi: int) -> list[int]:
        """Elements in ``[lo, hi)``."""
        if hi <= lo:
            return []
        self._extend_to(hi)
        return self._cache[bisect.bisect_left(self._cache, lo):bisect.bisect_left(self._cache, hi)]


class FactorialSet(SparseSet):
    kind = "factorial"

    def _generate(self):
        value, n = 1, 1
        while True:
            yield value
            n += 1
            value *= n

    def key(self):
        return ("factorial",)

    def spec(self):
        return "factorial"


class PowerSet(SparseSet):
    kind = "power"

    def __init__(self, base: int):
        super().__init__()
        if base < 2:
            raise ValueError("power base must be at least 2")
        self.base = base

    def _generate(self):
        value = 1
        while True:
            yield value
            value *= self.base

    def key(self):
        return ("power", self.base)

    def spec(self):
        return f"power:{self.base}"


class ChainSet(SparseSet):
    """The diagonal of a homogeneous chain, extended on demand."""

    kind = "chain"

    def __init__(self, homog: "HomogSet"):
        super().__init__()
        self.homog = homog

    def _generate(self):
        j = 0
        while True:
            yield self.homog.element(j)
            j += 1

    def key(self):
        return ("chain", self.homog.presentation.key(), self.homog.K, self.homog.level)

    def spec(self):
        return f"chain(K={self.homog.K})"


@dataclass(frozen=True)
class Source:
    """Letter bit ``bit`` is on at ``x + shift`` for every ``x`` in ``elements``."""

    bit: int
    elements: SparseSet
    shift: int = 0

    def positions(self) -> Iterator[int]:
        for x in self.elements:
            if x + self.shift >= 0:
                yield x + self.shift

    def between(self, lo: int, hi: int) -> list[int]:
        return [x + self.shift for x in self.elements.between(lo - self.shift, hi - self.shift)]

    def grid_positions(self) -> Iterator[int]:
        """Cut points contributed to the grid: ``e`` and ``e + 1`` for every
        element, unless the set supplies its own boundaries."""
        own = getattr(self.elements, "boundaries", None)
        if own is not None:
            for x in own():
                if x + self.shift >= 0:
                    yield x + self.shift
            return
        for e in self.positions():
            yield e
            yield e + 1

    def __contains__(self, i: int) -> bool:
        return i - self.shift in self.elements

    def key(self):
        return (self.bit, self.elements.key(), self.shift)


# ---------------------------------------------------------------------------
# Presentations


@dataclass(frozen=True, eq=False)
class OmegaPresentation:
    sig: Signature
    head: tuple[int, ...]
    period: tuple[int, ...]
    sources: tuple[Source, ...] = ()
    _grid: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not self.period:
            raise ValueError("the periodic part of an omega-word must be nonempty")
        limit = 1 << self.sig.width
        if any(not 0 <= a < limit for a in self.head + self.period):
            raise ValueError(f"letter outside the {self.sig.width}-bit alphabet")
        if any(not 0 <= s.bit < self.sig.width for s in self.sources):
            raise ValueError("source bit outside the signature")

    @property
    def width(self) -> int:
        return self.sig.width

    @property
    def is_lasso(self) -> bool:
        return not self.sources

    def key(self) -> tuple:
        return (self.sig, self.head, self.period, tuple(s.key() for s in self.sources))

    def __eq__(self, other):
        return isinstance(other, OmegaPresentation) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def background(self, i: int) -> int:
        if i < len(self.head):
            return self.head[i]
        return self.period[(i - len(self.head)) % len(self.period)]

    def letter(self, i: int) -> int:
        if i < 0:
            raise IndexError("omega-words have no negative positions")
        out = self.background(i)
        for s in self.sources:
            if i in s:
                out |= 1 << s.bit
        return out

    def letters(self, lo: int, hi: int) -> tuple[int, ...]:
        return tuple(self.letter(i) for i in range(lo, hi))

    def prepend(self, word: Sequence[int]) -> "OmegaPresentation":
        word = tuple(word)
        return OmegaPresentation(
            self.sig, word + self.head, self.period,
            tuple(Source(s.bit, s.elements, s.shift + len(word)) for s in self.sources),
        )

    def drop(self, c: int) -> "OmegaPresentation":
        """The suffix starting at position ``c``."""
        if c <= len(self.head):
            head, period = self.head[c:], self.period
        else:
            r = (c - len(self.head)) % len(self.period)
            head, period = (), self.period[r:] + self.period[:r]
        return OmegaPresentation(
            self.sig, head, period,
            tuple(Source(s.bit, s.elements, s.shift - c) for s in self.sources),
        )

    def with_signature(self, sig: Signature) -> "OmegaPresentation":
        if sig.width < self.sig.width:
            raise ValueError("cannot narrow the alphabet")
        return OmegaPresentation(sig, self.head, self.period, self.sources)

    def add_source(self, source: Source) -> "OmegaPresentation":
        return OmegaPresentation(self.sig, self.head, self.period, self.sources + (source,))

    def events(self, lo: int, hi: int) -> list[int]:
        out: set[int] = set()
        for s in self.sources:
            out.update(s.between(lo, hi))
        return sorted(out)

    # -- grid --------------------------------------------------------------

    def grid(self, i: int) -> int:
        """``i``-th grid position; the grid starts at 0."""
        if not self._grid:
            self._grid["points"] = []
            self._grid["gen"] = self._grid_points()
        points, gen = self._grid["points"], self._grid["gen"]
        while len(points) <= i:
            points.append(next(gen))
        return points[i]

    def _grid_points(self) -> Iterator[int]:
        yield 0
        last = 0
        if not self.sources:
            start = len(self.head)
            j = 0
            while True:
                x = start + j * len(self.period)
                if x > last:
                    last = x
                    yield x
                j += 1
        streams = [s.grid_positions() for s in self.sources]
        for x in heapq.merge(*streams):
            if x > last:
                last = x
                yield x


def lasso(prefix: Sequence[int], period: Sequence[int], sig: Signature | int = 0) -> OmegaPresentation:
    if isinstance(sig, int):
        sig = Signature.standard(sig)
    return OmegaPresentation(sig, tuple(prefix), tuple(period))


def pure(sig: Signature | int = 0) -> OmegaPresentation:
    """The order of the naturals with every predicate empty."""
    if isinstance(sig, int):
        sig = Signature.standard(sig)
    return lasso((), (0,), sig)


def parse_builtin(spec: str) -> SparseSet | tuple[tuple[int, ...], tuple[int, ...]]:
    """Either a sparse set, or the ``(prefix, period)`` bits of a periodic one."""
    parts = spec.strip().split(":")
    kind = parts[0]
    if kind == "factorial" and len(parts) == 1:
        return FactorialSet()
    if kind == "power" and len(parts) == 2:
        return PowerSet(int(parts[1]))
    if kind == "upbits" and len(parts) == 3:
        prefix, period = parts[1], parts[2]
        if set(prefix + period) - {"0", "1"} or not period:
            raise ValueError(f"bad upbits spec {spec!r}")
        return tuple(int(c) for c in prefix), tuple(int(c) for c in period)
    if kind == "finite" and len(parts) == 2:
        positions = sorted({int(x) for x in parts[1].split(",") if x.strip()})
        if positions and positions[0] < 0:
            raise ValueError("finite positions must be non-negative")
        size = positions[-1] + 1 if positions else 0
        return tuple(int(i in positions) for i in range(size)), (0,)
    if kind == "empty" and len(parts) == 1:
        return (), (0,)
    raise ValueError(f"unknown predicate spec {spec!r}")


def generator(sig: Signature, specs: Sequence[str]) -> OmegaPresentation:
    """Presentation whose predicate ``P(i+1)`` is given by builtin spec ``specs[i]``."""
    if len(specs) != sig.width:
        raise ValueError(f"expected {sig.width} predicate specs, got {len(specs)}")
    periodic = []
    sources = []
    for bit, spec in enumerate(specs):
        found = parse_builtin(spec)
        if isinstance(found, SparseSet):
            sources.append(Source(bit, found))
            periodic.append(((), (0,)))
        else:
            periodic.append(found)
    head_len = max(len(pre) for pre, _ in periodic) if periodic else 0
    lcm = 1
    for _, per in periodic:
        lcm = lcm * len(per) // math.gcd(lcm, len(per))

    def bit_at(pre, per, i):
        return pre[i] if i < len(pre) else per[(i - len(pre)) % len(per)]

    letters = [
        sum(bit_at(pre, per, i) << b for b, (pre, per) in enumerate(periodic))
        for i in range(head_len + lcm)
    ]
    return OmegaPresentation(sig, tuple(letters[:head_len]), tuple(letters[head_len:]), tuple(sources))


# ---------------------------------------------------------------------------
# Segment types


def _period_type(p: OmegaPresentation, level: int, tt: TypeTable, phase: int = 0) -> KType:
    rot = p.period[phase:] + p.period[:phase]
    return tt.word(rot, level, p.width)


def background_type(p: OmegaPresentation, lo: int, hi: int, level: int, tt: TypeTable) -> KType:
    """Type of ``[lo, hi)`` ignoring the sources."""
    out = tt.empty(level, p.width)
    if hi <= lo:
        return out
    h = len(p.head)
    if lo < h:
        out = tt.compose(out, tt.word(p.head[lo:min(hi, h)], level, p.width))
        lo = h
        if hi <= lo:
            return out
    per = len(p.period)
    phase = (lo - h) % per
    length = hi - lo
    first = min(length, per - phase) if phase else 0
    if first:
        out = tt.compose(out, tt.word(p.period[phase:phase + first], level, p.width))
        length -= first
    q, r = divmod(length, per)
    if q:
        out = tt.compose(out, tt.power(_period_type(p, level, tt), q))
    if r:
        out = tt.compose(out, tt.word(p.period[:r], level, p.width))
    return out


def segment_type(p: OmegaPresentation, lo: int, hi: int, level: int, tt: TypeTable) -> KType:
    """Level-``level`` type of the factor on positions ``[lo, hi)``."""
    if level > tt.k_max:
        raise ResourceError(f"level {level} exceeds k_max={tt.k_max}", level)
    lo = max(lo, 0)
    out = tt.empty(level, p.width)
    cur = lo
    for e in p.events(lo, hi):
        out = tt.compose(out, background_type(p, cur, e, level, tt))
        out = tt.compose(out, tt.letter(p.letter(e), level, p.width))
        cur = e + 1
    return tt.compose(out, background_type(p, cur, hi, level, tt))


# ---------------------------------------------------------------------------
# Gap-type periodicity


@dataclass
class GapPeriod:
    level: int
    start: int          # i0: gap types are periodic from this grid index
    period: int         # p
    types: list[KType]  # gap types for indices < start + period (at least)
    certified: bool     # True when periodicity is exact rather than horizon-checked

    def gap(self, i: int) -> KType:
        if i < len(self.types):
            return self.types[i]
        return self.types[self.start + (i - self.start) % self.period]

    def span(self, i: int, count: int, tt: TypeTable) -> KType:
        out = None
        for j in range(i, i + count):
            t = self.gap(j)
            out = t if out is None else tt.compose(out, t)
        return out


def _memo(tt: TypeTable, name: str) -> dict:
    """Per-table memo dict; cached values hold type ids of that table."""
    found = tt.__dict__.get(name)
    if found is None:
        found = tt.__dict__[name] = {}
    return found


def gap_period(p: OmegaPresentation, level: int, b: SearchBudget, tt: TypeTable) -> GapPeriod:
    """Find ``(i0, p)`` such that the level-``level`` grid gap types repeat with period p from i0."""
    memo = _memo(tt, "_gap_periods")
    memo_key = (p.key(), level, b)
    found = memo.get(memo_key)
    if found is not None:
        return found
    if p.is_lasso:
        i0 = 1 if p.head else 0
        if p.grid(i0 + 1) > b.horizon:
            raise ResourceError(f"horizon {b.horizon} is below the first period boundary", level)
        types = [segment_type(p, p.grid(i), p.grid(i + 1), level, tt) for i in range(i0 + 1)]
        out = GapPeriod(level, i0, 1, types, True)
        memo[memo_key] = out
        return out
    types = []
    i = cost = 0
    while len(types) < b.steps and cost < b.events and p.grid(i + 1) <= b.horizon:
        lo, hi = p.grid(i), p.grid(i + 1)
        cost += len(p.events(lo, hi)) + 1
        types.append(segment_type(p, lo, hi, level, tt))
        i += 1
    n = len(types)
    for per in range(1, n // 3 + 1):
        start = n - per
        while start > 0 and types[start - 1] == types[start - 1 + per]:
            start -= 1
        if n - start >= 3 * per:
            out = GapPeriod(level, start, per, types, False)
            memo[memo_key] = out
            return out
    raise ResourceError(
        f"no periodic pattern of grid gap types within {n} gaps below horizon {b.horizon}", level)


# ---------------------------------------------------------------------------
# Homogeneous chains


def idempotent_exponent(t: KType, tt: TypeTable) -> int:
    powers, mu = tt.power_cycle(t)
    lam = len(powers) - mu
    return lam * max(1, -(-mu // lam))


@dataclass
class HomogSet:
    """Nested homogeneous chains ``H_1 ⊇ ... ⊇ H_K`` over a grid.

    The tail of ``H_k`` is ``{g(starts[k] + j * steps[k])}``: every segment
    between two of its elements has the idempotent level-k type
    ``idempotents[k]``.  ``H_k`` keeps the first ``k`` elements of
    ``H_{k-1}``.  The diagonal is ``H_K``.
    """

    presentation: OmegaPresentation
    K: int
    level: int
    gaps: GapPeriod
    starts: list[int]
    steps: list[int]
    idempotents: list[KType | None]
    _memo: dict = field(default_factory=dict, repr=False)

    def tail(self, k: int, j: int) -> int:
        return self.presentation.grid(self.starts[k] + j * self.steps[k])

    def level_elements(self, k: int, count: int) -> list[int]:
        if k == 0:
            return list(range(count))
        key = (k, count)
        found = self._memo.get(key)
        if found is not None:
            return found
        out = self.level_elements(k - 1, k)[:min(k, count)]
        j = 0
        while len(out) < count:
            out.append(self.tail(k, j))
            j += 1
        self._memo[key] = out
        return out

    def element(self, i: int) -> int:
        K = self.K
        if i < K:
            return self.level_elements(K, K)[i]
        return self.tail(K, i - K)

    def elements(self, count: int) -> list[int]:
        return [self.element(i) for i in range(count)]

    def next_tail(self, k: int, x: int) -> int:
        """Least element of the tail of ``H_k`` that is ``>= x``."""
        j = 0
        while self.tail(k, j) < x:
            j += 1
        return self.tail(k, j)

    def verify(self, count: int, tt: TypeTable) -> list[str]:
        """Recheck homogeneity, idempotency and nesting on concrete segments."""
        problems = []
        p = self.presentation
        for k in range(1, self.K + 1):
            e = self.idempotents[k]
            if tt.compose(e, e) != e:
                problems.append(f"level {k}: stored type is not idempotent")
            elems = self.level_elements(k, max(count, k + 2))
            tail = elems[k:]
            for i in range(len(tail)):
                for j in range(i + 1, len(tail)):
                    t = segment_type(p, tail[i], tail[j], k, tt)
                    if t != e:
                        problems.append(f"level {k}: segment [{tail[i]}, {tail[j]}) has another type")
            if k >= 1:
                lower = self.level_elements(k - 1, k)
                if elems[:k] != lower[:k]:
                    problems.append(f"level {k}: first {k} elements differ from level {k - 1}")
        return problems


def build_uniform_homog(p: OmegaPresentation, K: int, b: SearchBudget, tt: TypeTable,
                        level: int | None = None, check: int = 0) -> HomogSet:
    """Nested homogeneous chains up to level ``K``.

    Grid gap types are computed at ``level`` (default ``min(k_max, K + 1)``)
    and must repeat periodically; each level then groups ``steps[k-1]`` gaps
    into one block and takes the idempotent power of the block type.
    With ``check > 0`` the first ``check`` elements of every level are
    re-verified by direct segment computations.
    """
    if K > tt.k_max:
        raise ResourceError(f"homogeneity level {K} exceeds k_max={tt.k_max}", K)
    if level is None:
        level = min(tt.k_max, K + 1)
    if level < K:
        raise ValueError("certification level below the homogeneity level")
    if b.horizon <= 0:
        raise ResourceError("horizon 0 leaves nothing to search", max(K, 1))
    memo = _memo(tt, "_homog_sets")
    key = (p.key(), K, level, b)
    found = memo.get(key)
    if found is not None and not check:
        return found
    gaps = gap_period(p, level, b, tt)
    starts = [0]
    steps = [gaps.period]
    idempotents: list[KType | None] = [None]
    a = gaps.start
    while p.grid(a) == 0:
        a += 1
    for k in range(1, K + 1):
        if k > 1:
            a = starts[k - 1] + steps[k - 1]
        block = tt.downgrade(gaps.span(a, steps[k - 1], tt), k)
        m = idempotent_exponent(block, tt)
        starts.append(a)
        steps.append(steps[k - 1] * m)
        idempotents.append(tt.power(block, m))
    hs = HomogSet(p, K, level, gaps, starts, steps, idempotents)
    if check:
        problems = hs.verify(check, tt)
        if problems:
            raise ResourceError("homogeneity check failed: " + "; ".join(problems), K)
    memo[key] = hs
    return hs


# ---------------------------------------------------------------------------
# Types and decisions


def structure_type(p: OmegaPresentation, k: int, b: SearchBudget, tt: TypeTable,
                   route: str = "auto") -> KType:
    """``T^k`` of the whole omega-word.

    ``route`` is ``"fast"`` (lassos only: ``T(u) + omega(T(v))``),
    ``"homog"`` (prefix up to the k-th element of ``H_k`` plus the omega
    power of its idempotent), or ``"auto"``.
    """
    if k > tt.k_max:
        raise ResourceError(f"level {k} exceeds k_max={tt.k_max}", k)
    if k == 0:
        return tt.empty(0, p.width)
    if route == "auto":
        route = "fast" if p.is_lasso else "homog"
    if route == "fast":
        if not p.is_lasso:
            raise ValueError("the fast path needs a lasso presentation")
        if b.horizon <= 0:
            raise ResourceError("horizon 0 leaves nothing to search", k)
        head = tt.word(p.head, k, p.width)
        return tt.compose(head, tt.omega(tt.word(p.period, k, p.width)))
    if route != "homog":
        raise ValueError(f"unknown route {route!r}")
    hs = build_uniform_homog(p, k, b, tt, level=k)
    return tail_type(p, 0, hs, k, tt)


def tail_type(p: OmegaPresentation, a: int, hs: HomogSet, k: int, tt: TypeTable) -> KType:
    """``T^k`` of the suffix from ``a``, using the tail of ``H_k``."""
    h = hs.next_tail(k, a)
    return tt.compose(segment_type(p, a, h, k, tt), tt.omega(hs.idempotents[k]))


def _check_sentence(f: Formula, sig: Signature, width: int, k_max: int):
    if free_variables(f):
        raise FormulaError("expected a sentence")
    if sig.width != width:
        raise TypeMismatchError(f"formula signature width {sig.width} != structure width {width}")
    if f.qd > k_max:
        raise ResourceError(f"quantifier depth {f.qd} exceeds k_max={k_max}", f.qd)


def decide(p: OmegaPresentation, f: Formula, b: SearchBudget, tt: TypeTable) -> bool:
    _check_sentence(f, p.sig, p.width, tt.k_max)
    return tt.holds(structure_type(p, max(f.qd, 1), b, tt), f, p.sig)


# ---------------------------------------------------------------------------
# Expansion


def expand(p: OmegaPresentation, b: SearchBudget, tt: TypeTable,
           K: int = 2, level: int | None = None, name: str = "H") -> OmegaPresentation:
    """Expand by a fresh predicate holding on the diagonal of a homogeneous chain."""
    if p.sig.expansion_name is not None:
        raise ValueError("presentation already carries an expansion predicate")
    hs = build_uniform_homog(p, K, b, tt, level)
    sig = p.sig.expanded(name)
    return OmegaPresentation(sig, p.head, p.period, p.sources + (Source(sig.n, ChainSet(hs)),))


def expansion_chain(q: OmegaPresentation) -> tuple[HomogSet, OmegaPresentation]:
    """The chain behind an expanded presentation and the unexpanded original."""
    bit = q.sig.n
    for s in q.sources:
        if s.bit == bit and isinstance(s.elements, ChainSet) and s.shift == 0:
            base = s.elements.homog.presentation
            return s.elements.homog, base
    raise ValueError("not a presentation produced by expand")


def expanded_type(q: OmegaPresentation, k: int, tt: TypeTable, b: SearchBudget = SearchBudget(),
                  route: str = "direct") -> KType:
    """``T^k`` of an expanded word.

    ``direct``: ``T^k([0, h_{k+2})) + omega(tau')`` where ``tau'`` is the
    type of ``[h_{k+2}, h_{k+3})`` with its minimum marked.
    ``syntactic``: ``tau'`` is read off the level-(k+1) type of the
    unexpanded segment by locating the point extension at the minimum.
    ``generic``: the homogeneous route applied to the expanded word itself.
    """
    hs, base = expansion_chain(q)
    if k + 1 > hs.level:
        raise ResourceError(
            f"level {k} needs consecutive chain segments certified at level {k + 1}", k)
    if route == "generic":
        return structure_type(q, k, b, tt, route="homog")
    if k == 0:
        return tt.empty(0, q.width)
    h2, h3 = hs.element(k + 2), hs.element(k + 3)
    head = segment_type(q, 0, h2, k, tt)
    if route == "direct":
        tau = segment_type(q, h2, h3, k, tt)
    elif route == "syntactic":
        tau = marked_minimum_type(segment_type(base, h2, h3, k + 1, tt), base.sig, tt)
    else:
        raise ValueError(f"unknown route {route!r}")
    return tt.compose(head, tt.omega(tau))


_MIN = Forall("y", Le("x", "y"))


def marked_minimum_type(s: KType, sig: Signature, tt: TypeTable) -> KType:
    """From ``T^{k+1}`` of a nonempty word, ``T^k`` of the word with its minimum marked by a new top bit."""
    track = len(s.kinds)
    kids = [tt[c] for c in s.points]
    found = [c for c in kids if c.present(track) and tt.holds(c, _MIN, sig, {"x": track})]
    if len(found) != 1:
        raise ValueError("expected exactly one point extension at the minimum")
    return tt.mark_point(found[0], track)


def er_agreement(q: OmegaPresentation, k: int, sentences: Sequence[Formula], tt: TypeTable) -> list[Formula]:
    """Sentences whose truth on a marked tail segment disagrees with their H-free rewriting."""
    hs, base = expansion_chain(q)
    h2, h3 = hs.element(k + 2), hs.element(k + 3)
    s = segment_type(base, h2, h3, k + 1, tt)
    tau = marked_minimum_type(s, base.sig, tt)
    bad = []
    for f in sentences:
        if f.qd > k:
            continue
        g = transform_er(f, q.sig)
        if tt.holds(tau, f, q.sig) != tt.holds(s, g, base.sig):
            bad.append(f)
    return bad


def indistinguishability_check(p: OmegaPresentation, a: int, b_pos: int, k: int, tt: TypeTable,
                               budget: SearchBudget = SearchBudget(),
                               homog: HomogSet | None = None) -> bool:
    """Whether positions ``a`` and ``b_pos`` have equal k-types on both sides."""
    if a < 0 or b_pos < 0:
        raise ValueError("positions must be non-negative")
    if a == b_pos:
        return True
    if segment_type(p, 0, a, k, tt) != segment_type(p, 0, b_pos, k, tt):
        return False
    hs = homog if homog is not None and homog.K >= k else build_uniform_homog(p, k, budget, tt, level=k)
    ha, hb = hs.next_tail(k, a), hs.next_tail(k, b_pos)
    fa, fb = segment_type(p, a, ha, k, tt), segment_type(p, b_pos, hb, k, tt)
    if fa == fb:
        return True
    w = tt.omega(hs.idempotents[k])
    return tt.compose(fa, w) == tt.compose(fb, w)
