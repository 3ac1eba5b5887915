"""Compile MSO formulas on finite words into automata.

This is the classical automaton construction used only as an oracle that
is independent of the type algebra.  A letter is an int whose low ``width``
bits are the structure letter and whose higher bits are one track per
variable.  First-order variables are sets constrained to be singletons
when they are quantified.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import FormulaError, ResourceError, UnboundVariableError
from .formula import (
    And,
    Eq,
    Exists,
    ExistsSet,
    FiniteModel,
    Forall,
    ForallSet,
    Formula,
    Implies,
    In,
    Le,
    Lt,
    Not,
    Or,
    Pred,
    Signature,
    free_variables,
    is_point_var,
)

STATE_CAP = 10**5


@dataclass(frozen=True)
class Nfa:
    """Nondeterministic automaton over ``2**bits`` letters.

    ``delta[q]`` maps a letter to the successor states of ``q``; missing
    letters have no successor.  ``tracks`` names the variable tracks above
    the structure bits.
    """

    states: int
    bits: int
    delta: tuple[dict[int, frozenset[int]], ...]
    initial: frozenset[int]
    accepting: frozenset[int]
    tracks: tuple[str, ...] = ()

    def __post_init__(self):
        for row in self.delta:
            for succ in row.values():
                if any(not 0 <= q < self.states for q in succ):
                    raise ValueError("transition to a missing state")
        if len(self.delta) != self.states:
            raise ValueError("one transition row per state expected")

    @property
    def letters(self) -> int:
        return 1 << self.bits

    @property
    def deterministic(self) -> bool:
        return len(self.initial) == 1 and all(
            len(row) == self.letters and all(len(s) == 1 for s in row.values())
            for row in self.delta
        )


def accepts(a: Nfa, word: Sequence[int]) -> bool:
    current = set(a.initial)
    for letter in word:
        if not 0 <= letter < a.letters:
            raise ValueError(f"letter {letter} outside a {a.bits}-bit alphabet")
        nxt: set[int] = set()
        for q in current:
            nxt |= a.delta[q].get(letter, frozenset())
        current = nxt
        if not current:
            return False
    return bool(current & a.accepting)


# -- deterministic building blocks --------------------------------------


def _dfa(bits: int, table: list[list[int]], accepting: Iterable[int], tracks=()) -> Nfa:
    delta = tuple({c: frozenset((row[c],)) for c in range(1 << bits)} for row in table)
    return Nfa(len(table), bits, delta, frozenset((0,)), frozenset(accepting), tuple(tracks))


def _step(a: Nfa, q: int, c: int) -> int:
    (out,) = a.delta[q][c]
    return out


def determinize(a: Nfa, cap: int = STATE_CAP) -> Nfa:
    """Subset construction restricted to reachable subsets."""
    if a.deterministic:
        return a
    start = frozenset(a.initial)
    index = {start: 0}
    order = [start]
    table: list[list[int]] = []
    i = 0
    while i < len(order):
        subset = order[i]
        row = []
        for c in range(a.letters):
            nxt = frozenset(q2 for q in subset for q2 in a.delta[q].get(c, ()))
            j = index.get(nxt)
            if j is None:
                j = len(order)
                if j >= cap:
                    raise ResourceError(f"subset construction exceeded {cap} states")
                index[nxt] = j
                order.append(nxt)
            row.append(j)
        table.append(row)
        i += 1
    accepting = [j for j, s in enumerate(order) if s & a.accepting]
    return minimize(_dfa(a.bits, table, accepting, a.tracks))


def minimize(a: Nfa) -> Nfa:
    """Moore partition refinement on a complete deterministic automaton."""
    n = a.states
    table = [[_step(a, q, c) for c in range(a.letters)] for q in range(n)]
    block = [1 if q in a.accepting else 0 for q in range(n)]
    while True:
        sig = {}
        new = []
        for q in range(n):
            key = (block[q], tuple(block[r] for r in table[q]))
            new.append(sig.setdefault(key, len(sig)))
        if len(sig) == len(set(block)):
            break
        block = new
    # renumber so the initial state is 0
    (init,) = a.initial
    remap = {block[init]: 0}
    for q in range(n):
        remap.setdefault(block[q], len(remap))
    out = [None] * len(remap)
    for q in range(n):
        b = remap[block[q]]
        if out[b] is None:
            out[b] = [remap[block[r]] for r in table[q]]
    accepting = {remap[block[q]] for q in a.accepting}
    return _dfa(a.bits, out, accepting, a.tracks)


def complement(a: Nfa) -> Nfa:
    d = determinize(a)
    return Nfa(d.states, d.bits, d.delta, d.initial,
               frozenset(range(d.states)) - d.accepting, d.tracks)


def product(a: Nfa, b: Nfa, mode: str, cap: int = STATE_CAP) -> Nfa:
    """Synchronous product; ``mode`` is ``"and"`` or ``"or"``."""
    a, b = determinize(a, cap), determinize(b, cap)
    if a.bits != b.bits:
        raise ValueError("product of automata over different alphabets")
    (ia,), (ib,) = a.initial, b.initial
    index = {(ia, ib): 0}
    order = [(ia, ib)]
    table = []
    i = 0
    while i < len(order):
        p, q = order[i]
        row = []
        for c in range(a.letters):
            nxt = (_step(a, p, c), _step(b, q, c))
            j = index.get(nxt)
            if j is None:
                j = len(order)
                if j >= cap:
                    raise ResourceError(f"product exceeded {cap} states")
                index[nxt] = j
                order.append(nxt)
            row.append(j)
        table.append(row)
        i += 1
    if mode == "and":
        accepting = [j for j, (p, q) in enumerate(order) if p in a.accepting and q in b.accepting]
    else:
        accepting = [j for j, (p, q) in enumerate(order) if p in a.accepting or q in b.accepting]
    return minimize(_dfa(a.bits, table, accepting, a.tracks))


def project(a: Nfa, bit: int) -> Nfa:
    """Existentially forget the top track ``bit`` (must be the highest bit)."""
    if bit != a.bits - 1:
        raise ValueError("only the top track can be projected")
    low = (1 << bit) - 1
    delta = []
    for row in a.delta:
        merged: dict[int, set[int]] = {}
        for c, succ in row.items():
            merged.setdefault(c & low, set()).update(succ)
        delta.append({c: frozenset(s) for c, s in merged.items()})
    return Nfa(a.states, bit, tuple(delta), a.initial, a.accepting, a.tracks[:-1])


# -- atoms -----------------------------------------------------------------


def _order_atom(bits: int, bx: int, by: int, accept: set[int]) -> Nfa:
    # 0 none seen, 1 only x, 2 only y, 3 x before y, 4 together, 5 y before x
    table = []
    for q in range(6):
        row = []
        for c in range(1 << bits):
            hx, hy = bool(c >> bx & 1), bool(c >> by & 1)
            if q == 0:
                r = 4 if hx and hy else 1 if hx else 2 if hy else 0
            elif q == 1:
                r = 3 if hy else 1
            elif q == 2:
                r = 5 if hx else 2
            else:
                r = q
            row.append(r)
        table.append(row)
    return _dfa(bits, table, accept)


def _test_atom(bits: int, bx: int, btest: int) -> Nfa:
    # 0 not seen, 1 seen with the bit set, 2 seen without it
    table = []
    for q in range(3):
        row = []
        for c in range(1 << bits):
            if q == 0 and c >> bx & 1:
                row.append(1 if c >> btest & 1 else 2)
            else:
                row.append(q)
        table.append(row)
    return _dfa(bits, table, {1})


def _singleton(bits: int, bx: int) -> Nfa:
    table = [[min(q + (c >> bx & 1), 2) for c in range(1 << bits)] for q in range(3)]
    return _dfa(bits, table, {1})


# -- compilation -----------------------------------------------------------


def compile(f: Formula, sig: Signature, free: Sequence[str] | None = None,
            cap: int = STATE_CAP) -> Nfa:
    """Automaton accepting the track encodings of the finite models of ``f``.

    Free variables get tracks in the order given by ``free`` (sorted names by
    default), directly above the ``sig.width`` structure bits.
    """
    fv = free_variables(f)
    names = tuple(sorted(fv) if free is None else free)
    if fv - set(names):
        raise UnboundVariableError(f"undeclared free variables {sorted(fv - set(names))}")
    tracks = {v: sig.width + i for i, v in enumerate(names)}
    a = _compile(f, sig, tracks, sig.width + len(names), cap)
    for v in names:
        if is_point_var(v):
            a = product(a, _singleton(a.bits, tracks[v]), "and", cap)
    a = determinize(a, cap)
    return Nfa(a.states, a.bits, a.delta, a.initial, a.accepting, names)


def _compile(f: Formula, sig: Signature, tracks: dict[str, int], bits: int, cap: int) -> Nfa:
    if isinstance(f, Lt):
        return _order_atom(bits, tracks[f.x], tracks[f.y], {3})
    if isinstance(f, Le):
        return _order_atom(bits, tracks[f.x], tracks[f.y], {3, 4})
    if isinstance(f, Eq):
        return _order_atom(bits, tracks[f.x], tracks[f.y], {4})
    if isinstance(f, Pred):
        return _test_atom(bits, tracks[f.x], sig.index(f.name))
    if isinstance(f, In):
        return _test_atom(bits, tracks[f.x], tracks[f.X])
    if isinstance(f, Not):
        return complement(_compile(f.body, sig, tracks, bits, cap))
    if isinstance(f, And):
        return product(_compile(f.left, sig, tracks, bits, cap),
                       _compile(f.right, sig, tracks, bits, cap), "and", cap)
    if isinstance(f, Or):
        return product(_compile(f.left, sig, tracks, bits, cap),
                       _compile(f.right, sig, tracks, bits, cap), "or", cap)
    if isinstance(f, Implies):
        return product(complement(_compile(f.left, sig, tracks, bits, cap)),
                       _compile(f.right, sig, tracks, bits, cap), "or", cap)
    if isinstance(f, (Forall, ForallSet)):
        inner = Exists if isinstance(f, Forall) else ExistsSet
        return complement(_compile(inner(f.var, Not(f.body)), sig, tracks, bits, cap))
    if isinstance(f, (Exists, ExistsSet)):
        inner_tracks = {**tracks, f.var: bits}
        body = _compile(f.body, sig, inner_tracks, bits + 1, cap)
        if isinstance(f, Exists):
            body = product(body, _singleton(bits + 1, bits), "and", cap)
        return determinize(project(body, bits), cap)
    raise FormulaError(f"unknown node {f!r}")


def encode_model(m: FiniteModel, tracks: Sequence[str]) -> tuple[int, ...]:
    """Track word of a finite model for an automaton with the given tracks."""
    width = m.sig.width
    out = list(m.word)
    for i, v in enumerate(tracks):
        val = m.assignment[v]
        positions = (val,) if is_point_var(v) else val
        for p in positions:
            out[p] |= 1 << (width + i)
    return tuple(out)


def accepts_model(a: Nfa, m: FiniteModel) -> bool:
    return accepts(a, encode_model(m, a.tracks))
