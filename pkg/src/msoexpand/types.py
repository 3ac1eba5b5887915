"""Canonical k-types of labelled linear orders and their algebra.

A level-``k`` type is stored the way the k-round MSO Ehrenfeucht-Fraisse
game sees a structure:

* ``atoms``: the letters sitting at positions that carry a marked point,
  in left-to-right order.  Marked points and marked sets are extra letter
  bits (tracks) above the ``width`` predicate bits.
* ``points``: the level-``k-1`` types of every one-point extension, plus the
  extension in which the new point is *absent*.  The absent child is what
  makes sums compositional: in ``s + t`` a new point lies in exactly one
  summand and is absent from the other.
* ``sets``: the level-``k-1`` types of every one-set extension.

Children are interned ids sorted ascending, so equal structures hash equal
and two structures get the same id exactly when they are k-equivalent.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import FormulaError, ResourceError, TypeMismatchError
from .formula import (
    And,
    Eq,
    Exists,
    ExistsSet,
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
)

K_MAX = 3
WORD_CAP = 8
REGISTRY_CAP = 10**6
CLOSURE_CAP = 10**5
PAIR_CAP = 10**6


@dataclass(frozen=True, eq=False)
class KType:
    id: int
    level: int
    width: int
    kinds: str
    atoms: tuple[int, ...]
    points: tuple[int, ...]
    sets: tuple[int, ...]

    def __eq__(self, other):
        return isinstance(other, KType) and other.id == self.id

    def __hash__(self):
        return hash(self.id)

    def __repr__(self):
        return f"KType(#{self.id}, level={self.level}, width={self.width}, kinds={self.kinds!r})"

    @property
    def point_mask(self) -> int:
        mask = 0
        for i, kind in enumerate(self.kinds):
            if kind == "p":
                mask |= 1 << (self.width + i)
        return mask

    def present(self, track: int) -> bool:
        bit = 1 << (self.width + track)
        return any(a & bit for a in self.atoms)


class TypeTable:
    """Registry of interned types plus memo tables for the algebra.

    Reads are lock-free; insertions go through one lock.
    """

    def __init__(self, k_max: int = K_MAX, word_cap: int = WORD_CAP,
                 registry_cap: int = REGISTRY_CAP, closure_cap: int = CLOSURE_CAP,
                 pair_cap: int = PAIR_CAP):
        self.k_max = k_max
        self.word_cap = word_cap
        self.registry_cap = registry_cap
        self.closure_cap = closure_cap
        self.pair_cap = pair_cap
        self._types: list[KType] = []
        self._index: dict[tuple, int] = {}
        self._lock = threading.Lock()
        self._sum: dict[int, dict[int, int]] = {}
        self._omega: dict[int, int] = {}
        self._reverse: dict[int, int] = {}
        self._letter: dict[tuple, int] = {}
        self._empty: dict[tuple, int] = {}
        self._powers: dict[int, tuple[list[int], int]] = {}
        self._orbits: dict[tuple[int, int], tuple[list[int], int]] = {}
        self._down: dict[int, int] = {}
        self._mark: dict[tuple[int, int], int] = {}
        self._direct: dict[tuple, int] = {}
        self._holds: dict[tuple, bool] = {}

    def __len__(self):
        return len(self._types)

    def __getitem__(self, ident: int) -> KType:
        return self._types[ident]

    def intern(self, level, width, kinds, atoms, points=(), sets=()) -> KType:
        key = (level, width, kinds, tuple(atoms), tuple(sorted(set(points))), tuple(sorted(set(sets))))
        found = self._index.get(key)
        if found is not None:
            return self._types[found]
        with self._lock:
            found = self._index.get(key)
            if found is not None:
                return self._types[found]
            if len(self._types) >= self.registry_cap:
                raise ResourceError(f"type registry exceeded {self.registry_cap} entries", level)
            t = KType(len(self._types), level, width, kinds, key[3], key[4], key[5])
            self._types.append(t)
            self._index[key] = t.id
            return t

    # -- building blocks -------------------------------------------------

    def empty(self, level: int, width: int, kinds: str = "") -> KType:
        key = (level, width, kinds)
        found = self._empty.get(key)
        if found is not None:
            return self._types[found]
        if level == 0:
            t = self.intern(0, width, kinds, ())
        else:
            t = self.intern(
                level, width, kinds, (),
                (self.empty(level - 1, width, kinds + "p").id,),
                (self.empty(level - 1, width, kinds + "s").id,),
            )
        self._empty[key] = t.id
        return t

    def is_empty(self, t: KType) -> bool:
        return self.empty(t.level, t.width, t.kinds).id == t.id

    def letter(self, letter: int, level: int, width: int, kinds: str = "") -> KType:
        key = (letter, level, width, kinds)
        found = self._letter.get(key)
        if found is not None:
            return self._types[found]
        mask = _point_mask(width, kinds)
        atoms = (letter,) if letter & mask else ()
        if level == 0:
            t = self.intern(0, width, kinds, atoms)
        else:
            bit = 1 << (width + len(kinds))
            t = self.intern(
                level, width, kinds, atoms,
                (self.letter(letter | bit, level - 1, width, kinds + "p").id,
                 self.letter(letter, level - 1, width, kinds + "p").id),
                (self.letter(letter | bit, level - 1, width, kinds + "s").id,
                 self.letter(letter, level - 1, width, kinds + "s").id),
            )
        self._letter[key] = t.id
        return t

    # -- the algebra -----------------------------------------------------

    def compose(self, s: KType, t: KType) -> KType:
        """Type of the ordered sum of a structure of type ``s`` and one of type ``t``."""
        row = self._sum.get(s.id)
        if row is not None:
            found = row.get(t.id)
            if found is not None:
                return self._types[found]
        if (s.level, s.width, s.kinds) != (t.level, t.width, t.kinds):
            raise TypeMismatchError(f"cannot add {s!r} and {t!r}")
        if self.is_empty(s):
            out = t
        elif self.is_empty(t):
            out = s
        elif s.level == 0:
            out = self.intern(0, s.width, s.kinds, s.atoms + t.atoms)
        else:
            if len(s.sets) * len(t.sets) > self.pair_cap:
                raise ResourceError(
                    f"sum of types with {len(s.sets)} and {len(t.sets)} set extensions "
                    f"exceeds the pair cap {self.pair_cap}", s.level)
            track = len(s.kinds)
            absent = tuple(b for b in t.points if not self._types[b].present(track))
            points: set[int] = set()
            for a in s.points:
                self._sum_row(a, absent if self._types[a].present(track) else t.points, points)
            sets: set[int] = set()
            for a in s.sets:
                self._sum_row(a, t.sets, sets)
            out = self.intern(s.level, s.width, s.kinds, s.atoms + t.atoms, points, sets)
        self._sum.setdefault(s.id, {})[t.id] = out.id
        return out

    def _sum_row(self, a: int, bs: tuple[int, ...], into: set[int]) -> None:
        """Add the ids of ``a + b`` for every ``b`` in ``bs`` to ``into``."""
        row = self._sum.get(a)
        if row is None:
            row = self._sum[a] = {}
        try:
            into.update(map(row.__getitem__, bs))
        except KeyError:
            ta = self._types[a]
            for b in bs:
                if b not in row:
                    self.compose(ta, self._types[b])
            into.update(map(row.__getitem__, bs))

    def sum(self, types: Iterable[KType], level=None, width=None, kinds="") -> KType:
        out = None
        for t in types:
            out = t if out is None else self.compose(out, t)
        if out is None:
            if level is None or width is None:
                raise ValueError("empty sum needs level and width")
            return self.empty(level, width, kinds)
        return out

    def power_cycle(self, t: KType) -> tuple[list[KType], int]:
        """Return ``(powers, mu)`` with ``powers[i]`` the i-fold sum of ``t``.

        ``powers[len(powers)]`` would repeat ``powers[mu]``; beyond ``mu`` the
        sequence is periodic with period ``len(powers) - mu``.
        """
        found = self._powers.get(t.id)
        if found is not None:
            ids, mu = found
            return [self._types[i] for i in ids], mu
        seen: dict[int, int] = {}
        ids = []
        cur = self.empty(t.level, t.width, t.kinds)
        while cur.id not in seen:
            if len(ids) > self.closure_cap:
                raise ResourceError("power sequence did not cycle", t.level)
            seen[cur.id] = len(ids)
            ids.append(cur.id)
            cur = self.compose(cur, t)
        mu = seen[cur.id]
        self._powers[t.id] = (ids, mu)
        return [self._types[i] for i in ids], mu

    def power(self, t: KType, m: int) -> KType:
        powers, mu = self.power_cycle(t)
        if m < len(powers):
            return powers[m]
        lam = len(powers) - mu
        return powers[mu + (m - mu) % lam]

    def idempotent_power(self, t: KType) -> KType:
        """The unique idempotent among the positive powers of ``t``."""
        powers, mu = self.power_cycle(t)
        lam = len(powers) - mu
        m = lam * max(1, -(-mu // lam))
        return self.power(t, m)

    def add_power(self, t: KType, g: KType, q: int) -> KType:
        """``t + g + ... + g`` with ``q`` copies of ``g``, for huge ``q``."""
        key = (t.id, g.id)
        found = self._orbits.get(key)
        if found is None:
            seen: dict[int, int] = {}
            ids: list[int] = []
            cur = t
            while cur.id not in seen:
                if len(ids) > self.closure_cap:
                    raise ResourceError("orbit did not cycle", t.level)
                seen[cur.id] = len(ids)
                ids.append(cur.id)
                if len(ids) > q:
                    # short request: no need to find the cycle yet
                    return self._types[ids[q]]
                cur = self.compose(cur, g)
            found = (ids, seen[cur.id])
            self._orbits[key] = found
        ids, mu = found
        if q < len(ids):
            return self._types[ids[q]]
        lam = len(ids) - mu
        return self._types[ids[mu + (q - mu) % lam]]

    def closure(self, gens: Sequence[KType]) -> list[KType]:
        """Subsemigroup generated by ``gens`` under ordered sum."""
        found = {g.id: g for g in gens}
        frontier = list(found.values())
        while frontier:
            nxt = []
            for s in frontier:
                for g in gens:
                    u = self.compose(s, g)
                    if u.id not in found:
                        found[u.id] = u
                        nxt.append(u)
                        if len(found) > self.closure_cap:
                            raise ResourceError("semigroup closure exceeded cap", s.level)
            frontier = nxt
        return list(found.values())

    def omega(self, t: KType) -> KType:
        """Type of an omega-indexed sum of structures that all have type ``t``.

        Copies are first grouped into blocks whose type is the idempotent
        power ``e`` of ``t``.  Point extensions: the point sits in block
        ``i``, giving ``z*i + c + omega(z)`` with ``z`` the absent-point child
        (itself idempotent, so only ``i = 0`` and ``i >= 1`` differ).  Set
        extensions: the set children of ``e`` form a semigroup ``S`` (closed
        because ``e + e = e``), and by additive Ramsey every omega-sequence
        over ``S`` sums to ``x + omega(f)`` with ``x`` in ``S`` and ``f`` an
        idempotent of ``S``.
        """
        found = self._omega.get(t.id)
        if found is not None:
            return self._types[found]
        if t.atoms:
            raise TypeMismatchError("omega power of a type with a marked point")
        if t.level == 0:
            out = t
        else:
            e = self.idempotent_power(t)
            if e.id != t.id:
                out = self.omega(e)
            else:
                out = self._omega_idempotent(e)
        self._omega[t.id] = out.id
        return out

    def _omega_idempotent(self, e: KType) -> KType:
        track = len(e.kinds)
        kids = [self._types[c] for c in e.points]
        z = next(c for c in kids if not c.present(track))
        wz = self.omega(z)
        points = {wz.id}
        for c in kids:
            if c.present(track):
                tail = self.compose(c, wz)
                points.add(tail.id)
                points.add(self.compose(z, tail).id)
        semigroup = [self._types[c] for c in e.sets]
        if len(semigroup) > self.closure_cap:
            raise ResourceError("too many set extensions for an omega power", e.level)
        tails = {
            self.omega(f).id for f in semigroup
            if self.compose(f, f).id == f.id
        }
        if len(semigroup) * len(tails) > self.pair_cap:
            raise ResourceError("omega power needs too many sums", e.level)
        sets = {
            self.compose(x, self._types[w]).id
            for x in semigroup for w in tails
        }
        return self.intern(e.level, e.width, e.kinds, (), points, sets)

    def reverse(self, t: KType) -> KType:
        found = self._reverse.get(t.id)
        if found is not None:
            return self._types[found]
        out = self.intern(
            t.level, t.width, t.kinds, t.atoms[::-1],
            (self.reverse(self._types[c]).id for c in t.points),
            (self.reverse(self._types[c]).id for c in t.sets),
        )
        self._reverse[t.id] = out.id
        self._reverse[out.id] = t.id
        return out

    def downgrade(self, t: KType, level: int | None = None) -> KType:
        """The level-``level`` type determined by ``t`` (default one lower)."""
        target = t.level - 1 if level is None else level
        if target > t.level or target < 0:
            raise ValueError(f"cannot downgrade level {t.level} to {target}")
        while t.level > target:
            t = self._down_one(t)
        return t

    def _down_one(self, t: KType) -> KType:
        found = self._down.get(t.id)
        if found is not None:
            return self._types[found]
        if t.level == 1:
            out = self.intern(0, t.width, t.kinds, t.atoms)
        else:
            out = self.intern(
                t.level - 1, t.width, t.kinds, t.atoms,
                (self._down_one(self._types[c]).id for c in t.points),
                (self._down_one(self._types[c]).id for c in t.sets),
            )
        self._down[t.id] = out.id
        return out

    def mark_point(self, t: KType, track: int) -> KType:
        """Turn point track ``track`` of ``t`` into a new top predicate bit.

        The type of ``(M, x)`` determines, at the same level, the type of
        ``M`` expanded by the predicate ``{x}``.  The new bit is ``width``;
        tracks below ``track`` move up by one bit, tracks above keep theirs.
        """
        key = (t.id, track)
        found = self._mark.get(key)
        if found is not None:
            return self._types[found]
        if t.kinds[track] != "p":
            raise ValueError("only point tracks can be marked")
        w = t.width
        kinds = t.kinds[:track] + t.kinds[track + 1:]
        atoms = tuple(_remap(a, w, track) for a in t.atoms)
        mask = _point_mask(w + 1, kinds)
        atoms = tuple(a for a in atoms if a & mask)
        if t.level == 0:
            out = self.intern(0, w + 1, kinds, atoms)
        else:
            out = self.intern(
                t.level, w + 1, kinds, atoms,
                (self.mark_point(self._types[c], track).id for c in t.points),
                (self.mark_point(self._types[c], track).id for c in t.sets),
            )
        self._mark[key] = out.id
        return out

    # -- words -----------------------------------------------------------

    def word(self, word: Sequence[int], level: int, width: int, kinds: str = "") -> KType:
        """Type of a finite word by folding letter types (no length cap)."""
        out = self.empty(level, width, kinds)
        for a in word:
            out = self.compose(out, self.letter(a, level, width, kinds))
        return out

    def direct(self, word: Sequence[int], level: int, width: int, kinds: str = "") -> KType:
        """Type of a finite word by enumerating every point and set extension."""
        word = tuple(word)
        key = (word, level, width, kinds)
        found = self._direct.get(key)
        if found is not None:
            return self._types[found]
        atoms = tuple(a for a in word if a & _point_mask(width, kinds))
        if level == 0:
            out = self.intern(0, width, kinds, atoms)
        else:
            bit = 1 << (width + len(kinds))
            pk, sk = kinds + "p", kinds + "s"
            points = {self.direct(word, level - 1, width, pk).id}
            for p in range(len(word)):
                marked = word[:p] + (word[p] | bit,) + word[p + 1:]
                points.add(self.direct(marked, level - 1, width, pk).id)
            sets = set()
            for mask in range(1 << len(word)):
                marked = tuple(a | bit if (mask >> i) & 1 else a for i, a in enumerate(word))
                sets.add(self.direct(marked, level - 1, width, sk).id)
            out = self.intern(level, width, kinds, atoms, points, sets)
        self._direct[key] = out.id
        return out

    # -- sentences -------------------------------------------------------

    def holds(self, t: KType, f: Formula, sig: Signature, env: dict[str, int] | None = None) -> bool:
        """Truth of ``f`` in every structure of type ``t``.

        ``env`` maps the free variables of ``f`` to track indices of ``t``.
        """
        return self._holds_rec(t, f, sig, dict(env or {}))

    def _holds_rec(self, t, f, sig, env) -> bool:
        key = (t.id, id(f), tuple(sorted(env.items())))
        found = self._holds.get(key)
        if found is not None and found[0] is f:
            return found[1]
        value = self._holds_eval(t, f, sig, env)
        self._holds[key] = (f, value)
        return value

    def _holds_eval(self, t, f, sig, env) -> bool:
        if isinstance(f, (Lt, Le, Eq)):
            i, j = _atom_index(t, env[f.x]), _atom_index(t, env[f.y])
            if isinstance(f, Lt):
                return i < j
            if isinstance(f, Le):
                return i <= j
            return i == j
        if isinstance(f, Pred):
            a = t.atoms[_atom_index(t, env[f.x])]
            return bool((a >> sig.index(f.name)) & 1)
        if isinstance(f, In):
            a = t.atoms[_atom_index(t, env[f.x])]
            return bool((a >> (t.width + env[f.X])) & 1)
        if isinstance(f, Not):
            return not self._holds_rec(t, f.body, sig, env)
        if isinstance(f, And):
            return self._holds_rec(t, f.left, sig, env) and self._holds_rec(t, f.right, sig, env)
        if isinstance(f, Or):
            return self._holds_rec(t, f.left, sig, env) or self._holds_rec(t, f.right, sig, env)
        if isinstance(f, Implies):
            return (not self._holds_rec(t, f.left, sig, env)) or self._holds_rec(t, f.right, sig, env)
        if t.level == 0:
            raise FormulaError("formula deeper than the type level")
        track = len(t.kinds)
        inner = {**env, f.var: track}
        if isinstance(f, (Exists, Forall)):
            kids = (self._types[c] for c in t.points)
            results = (self._holds_rec(c, f.body, sig, inner) for c in kids if c.present(track))
            return any(results) if isinstance(f, Exists) else all(results)
        if isinstance(f, (ExistsSet, ForallSet)):
            results = (self._holds_rec(self._types[c], f.body, sig, inner) for c in t.sets)
            return any(results) if isinstance(f, ExistsSet) else all(results)
        raise FormulaError(f"unknown node {f!r}")


def _point_mask(width: int, kinds: str) -> int:
    mask = 0
    for i, kind in enumerate(kinds):
        if kind == "p":
            mask |= 1 << (width + i)
    return mask


def _remap(letter: int, width: int, track: int) -> int:
    low = letter & ((1 << width) - 1)
    out = low
    for i in range(track):
        if (letter >> (width + i)) & 1:
            out |= 1 << (width + 1 + i)
    if (letter >> (width + track)) & 1:
        out |= 1 << width
    out |= letter & ~((1 << (width + track + 1)) - 1)
    return out


def _atom_index(t: KType, track: int) -> int:
    bit = 1 << (t.width + track)
    for i, a in enumerate(t.atoms):
        if a & bit:
            return i
    raise FormulaError(f"point track {track} is absent from {t!r}")


# ---------------------------------------------------------------------------
# Operation-level API


def _width_of(width_or_sig) -> int:
    if isinstance(width_or_sig, Signature):
        return width_or_sig.width
    return int(width_or_sig)


def type_of_finite(word: Sequence[int], k: int, width, tt: TypeTable) -> KType:
    """Level-``k`` type of a finite word computed by the EF recursion."""
    if k > tt.k_max:
        raise ResourceError(f"level {k} exceeds k_max={tt.k_max}", k)
    if len(word) > tt.word_cap:
        raise ResourceError(f"word length {len(word)} exceeds cap {tt.word_cap}", k)
    return tt.direct(tuple(word), k, _width_of(width))


def type_of_word(word: Sequence[int], k: int, width, tt: TypeTable) -> KType:
    """Level-``k`` type of a finite word of any length, by composition."""
    return tt.word(tuple(word), k, _width_of(width))


def compose_sum(s: KType, t: KType, tt: TypeTable) -> KType:
    return tt.compose(s, t)


def omega_power(t: KType, tt: TypeTable) -> KType:
    return tt.omega(t)


def reverse_type(t: KType, tt: TypeTable) -> KType:
    return tt.reverse(t)


def back_omega_power(t: KType, tt: TypeTable) -> KType:
    """Type of a (-omega)-indexed sum of copies of ``t``."""
    return tt.reverse(tt.omega(tt.reverse(t)))


def implies_sentence(t: KType, f: Formula, sig: Signature, tt: TypeTable) -> bool:
    """Decide ``f`` on every structure of type ``t``; needs ``qd(f) <= level``."""
    if free_variables(f):
        raise FormulaError("implies_sentence expects a sentence")
    if f.qd > t.level:
        raise FormulaError(f"quantifier depth {f.qd} exceeds type level {t.level}")
    if sig.width != t.width:
        raise TypeMismatchError(f"signature width {sig.width} != type width {t.width}")
    return tt.holds(t, f, sig)
