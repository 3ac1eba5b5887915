"""MSO formulas over labelled linear orders.

Letters of a word over ``{0,1}^n`` are stored as ints: bit ``i`` is the
truth value of predicate number ``i`` (``P1`` is bit 0).  The optional
expansion predicate ``H`` occupies bit ``n``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import (
    FormulaError,
    FormulaSyntaxError,
    UnboundVariableError,
    UnknownPredicateError,
)


@dataclass(frozen=True)
class Signature:
    predicate_names: tuple[str, ...] = ()
    expansion_name: str | None = None

    def __post_init__(self):
        names = list(self.predicate_names)
        if self.expansion_name is not None:
            names.append(self.expansion_name)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate predicate names in {names}")

    @classmethod
    def standard(cls, n: int, expansion: bool = False) -> "Signature":
        return cls(tuple(f"P{i + 1}" for i in range(n)), "H" if expansion else None)

    @property
    def n(self) -> int:
        return len(self.predicate_names)

    @property
    def width(self) -> int:
        """Number of letter bits: ``n`` plus one if the expansion is declared."""
        return self.n + (self.expansion_name is not None)

    def index(self, name: str) -> int:
        if name in self.predicate_names:
            return self.predicate_names.index(name)
        if name == self.expansion_name:
            return self.n
        raise UnknownPredicateError(f"unknown predicate {name!r}")

    def expanded(self, name: str = "H") -> "Signature":
        return Signature(self.predicate_names, name)

    def reduced(self) -> "Signature":
        return Signature(self.predicate_names, None)


# ---------------------------------------------------------------------------
# AST


class Formula:
    """Base class of the immutable formula tree."""

    def children(self) -> tuple["Formula", ...]:
        return ()

    @cached_property
    def qd(self) -> int:
        return _qd(self)

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Lt(Formula):
    x: str
    y: str


@dataclass(frozen=True)
class Le(Formula):
    x: str
    y: str


@dataclass(frozen=True)
class Eq(Formula):
    x: str
    y: str


@dataclass(frozen=True)
class Pred(Formula):
    name: str
    x: str


@dataclass(frozen=True)
class In(Formula):
    x: str
    X: str


@dataclass(frozen=True)
class Not(Formula):
    body: Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class ExistsSet(Formula):
    var: str
    body: Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class ForallSet(Formula):
    var: str
    body: Formula

    def children(self):
        return (self.body,)


ATOMS = (Lt, Le, Eq, Pred, In)
BINARY = (And, Or, Implies)
POINT_QUANTIFIERS = (Exists, Forall)
SET_QUANTIFIERS = (ExistsSet, ForallSet)
QUANTIFIERS = POINT_QUANTIFIERS + SET_QUANTIFIERS


def _qd(f: Formula) -> int:
    if isinstance(f, QUANTIFIERS):
        return 1 + f.body.qd
    return max((c.qd for c in f.children()), default=0)


def quantifier_depth(f: Formula) -> int:
    """Maximal quantifier nesting; point and set quantifiers count alike."""
    return _qd(f)


def conj(*parts: Formula) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(*parts: Formula) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def free_variables(f: Formula) -> frozenset[str]:
    if isinstance(f, (Lt, Le, Eq)):
        return frozenset((f.x, f.y))
    if isinstance(f, Pred):
        return frozenset((f.x,))
    if isinstance(f, In):
        return frozenset((f.x, f.X))
    if isinstance(f, QUANTIFIERS):
        return free_variables(f.body) - {f.var}
    out: frozenset[str] = frozenset()
    for c in f.children():
        out |= free_variables(c)
    return out


def all_variables(f: Formula) -> set[str]:
    out = set(free_variables(f))
    if isinstance(f, QUANTIFIERS):
        out.add(f.var)
    for c in f.children():
        out |= all_variables(c)
    return out


def predicates_used(f: Formula) -> set[str]:
    if isinstance(f, Pred):
        return {f.name}
    out: set[str] = set()
    for c in f.children():
        out |= predicates_used(c)
    return out


def is_point_var(name: str) -> bool:
    return name[:1].islower()


def is_set_var(name: str) -> bool:
    return name[:1].isupper()


# ---------------------------------------------------------------------------
# Concrete syntax

_TOKEN = re.compile(r"\s*(?:(<=|->|[<=&|~().])|([A-Za-z][A-Za-z0-9_]*))")
_KEYWORDS = {"E", "A", "E2", "A2", "in"}


def _tokenize(text: str) -> list[tuple[str, int]]:
    if not text.isascii():
        bad = next(i for i, ch in enumerate(text) if not ch.isascii())
        raise FormulaSyntaxError("non-ASCII character in formula", bad)
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        tok = m.group(1) or m.group(2)
        tokens.append((tok, m.start(m.lastindex)))
        pos = m.end()
    tokens.append(("<eof>", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.tokens = _tokenize(text)
        self.i = 0
        self.sig = sig

    def peek(self, offset=0):
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)][0]

    def pos(self):
        return self.tokens[min(self.i, len(self.tokens) - 1)][1]

    def take(self, expected=None):
        tok, pos = self.tokens[min(self.i, len(self.tokens) - 1)]
        if expected is not None and tok != expected:
            raise FormulaSyntaxError(f"expected {expected!r}, found {tok!r}", pos)
        self.i += 1
        return tok

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        out = self.conjunction()
        while self.peek() == "|":
            self.take()
            out = Or(out, self.conjunction())
        return out

    def conjunction(self) -> Formula:
        out = self.unary()
        while self.peek() == "&":
            self.take()
            out = And(out, self.unary())
        return out

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "~":
            self.take()
            return Not(self.unary())
        if tok in ("E", "A", "E2", "A2") and self.peek(2) == ".":
            return self.quantified()
        if tok == "(":
            self.take()
            inner = self.formula()
            self.take(")")
            return inner
        return self.atom()

    def quantified(self) -> Formula:
        q = self.take()
        pos = self.pos()
        var = self.take()
        if var in _KEYWORDS or not var[:1].isalpha():
            raise FormulaSyntaxError(f"bad variable name {var!r}", pos)
        if q in ("E", "A") and not is_point_var(var):
            raise FormulaSyntaxError(f"point variable must be lowercase: {var!r}", pos)
        if q in ("E2", "A2") and not is_set_var(var):
            raise FormulaSyntaxError(f"set variable must be uppercase: {var!r}", pos)
        self.take(".")
        body = self.formula()
        return {"E": Exists, "A": Forall, "E2": ExistsSet, "A2": ForallSet}[q](var, body)

    def atom(self) -> Formula:
        pos = self.pos()
        tok = self.take()
        if tok in ("<eof>", ")", "&", "|", "->", "<", "<=", "=", "."):
            raise FormulaSyntaxError(f"unexpected {tok!r}", pos)
        if self.peek() == "(":
            self.sig.index(tok)
            self.take("(")
            vpos = self.pos()
            var = self.take()
            if not is_point_var(var) or var in _KEYWORDS:
                raise FormulaSyntaxError(f"expected point variable, found {var!r}", vpos)
            self.take(")")
            return Pred(tok, var)
        if not is_point_var(tok) or tok in _KEYWORDS:
            raise FormulaSyntaxError(f"expected an atom, found {tok!r}", pos)
        op_pos = self.pos()
        op = self.take()
        rpos = self.pos()
        rhs = self.take()
        if op == "in":
            if not is_set_var(rhs) or rhs in _KEYWORDS:
                raise FormulaSyntaxError(f"expected set variable, found {rhs!r}", rpos)
            return In(tok, rhs)
        if op not in ("<", "<=", "="):
            raise FormulaSyntaxError(f"expected comparison, found {op!r}", op_pos)
        if not is_point_var(rhs) or rhs in _KEYWORDS:
            raise FormulaSyntaxError(f"expected point variable, found {rhs!r}", rpos)
        return {"<": Lt, "<=": Le, "=": Eq}[op](tok, rhs)


def parse(text: str, sig: Signature, free: Iterable[str] = ()) -> Formula:
    """Parse ASCII concrete syntax into a formula.

    Every variable must be bound or listed in ``free``.
    """
    p = _Parser(text, sig)
    f = p.formula()
    if p.peek() != "<eof>":
        raise FormulaSyntaxError(f"trailing input {p.peek()!r}", p.pos())
    unbound = free_variables(f) - set(free)
    if unbound:
        raise UnboundVariableError(f"unbound variables: {sorted(unbound)}")
    return f


_PREC = {Implies: 1, Or: 2, And: 3, Not: 4}


def to_text(f: Formula) -> str:
    """Render a formula so that ``parse`` reads back the same tree."""
    if isinstance(f, Lt):
        return f"{f.x} < {f.y}"
    if isinstance(f, Le):
        return f"{f.x} <= {f.y}"
    if isinstance(f, Eq):
        return f"{f.x} = {f.y}"
    if isinstance(f, Pred):
        return f"{f.name}({f.x})"
    if isinstance(f, In):
        return f"{f.x} in {f.X}"
    if isinstance(f, QUANTIFIERS):
        q = {Exists: "E", Forall: "A", ExistsSet: "E2", ForallSet: "A2"}[type(f)]
        return f"{q} {f.var}. {to_text(f.body)}"
    if isinstance(f, Not):
        return "~" + _wrap(f.body, 4, strict=False)
    op = {And: " & ", Or: " | ", Implies: " -> "}[type(f)]
    prec = _PREC[type(f)]
    if isinstance(f, Implies):
        # right associative
        return _wrap(f.left, prec, strict=True) + op + _wrap(f.right, prec, strict=False)
    return _wrap(f.left, prec, strict=False) + op + _wrap(f.right, prec, strict=True)


def _wrap(f: Formula, prec: int, strict: bool) -> str:
    text = to_text(f)
    if isinstance(f, QUANTIFIERS):
        return f"({text})"
    inner = _PREC.get(type(f))
    if inner is None:
        return text
    if inner < prec or (strict and inner == prec):
        return f"({text})"
    return text


def alpha_equivalent(f: Formula, g: Formula) -> bool:
    return _canon(f, {}, 0) == _canon(g, {}, 0)


def _canon(f: Formula, env: dict[str, str], depth: int):
    if isinstance(f, Pred):
        return ("Pred", f.name, env.get(f.x, f.x))
    if isinstance(f, ATOMS):
        a, b = (f.x, f.y) if not isinstance(f, In) else (f.x, f.X)
        return (type(f).__name__, env.get(a, a), env.get(b, b))
    if isinstance(f, QUANTIFIERS):
        bound = f"#{depth}"
        return (type(f).__name__, bound, _canon(f.body, {**env, f.var: bound}, depth + 1))
    return (type(f).__name__,) + tuple(_canon(c, env, depth) for c in f.children())


# ---------------------------------------------------------------------------
# Syntactic transformations


def fresh_name(taken: set[str], stem: str) -> str:
    if stem not in taken:
        return stem
    for i in itertools.count(1):
        cand = f"{stem}{i}"
        if cand not in taken:
            return cand
    raise AssertionError


def relativize(f: Formula, lower: str | None, upper: str | None) -> Formula:
    """Restrict every point quantifier of ``f`` to ``[lower, upper)``.

    ``None`` leaves that side of the interval open.  Set quantifiers are left
    alone: with all point variables confined to the interval, a formula can
    only observe the trace of a set on it, so quantifier depth is unchanged.
    """
    bounds = {b for b in (lower, upper) if b is not None}
    if not bounds:
        return f
    _check_capture(f, bounds)
    return _relativize(f, lower, upper)


def _check_capture(f: Formula, bounds: set[str]):
    if isinstance(f, QUANTIFIERS) and f.var in bounds:
        raise FormulaError(f"bound variable {f.var!r} would capture an interval endpoint")
    for c in f.children():
        _check_capture(c, bounds)


def _guard(z: str, lower: str | None, upper: str | None) -> Formula | None:
    parts = []
    if lower is not None:
        parts.append(Le(lower, z))
    if upper is not None:
        parts.append(Lt(z, upper))
    return conj(*parts) if parts else None


def _relativize(f, lower, upper):
    if isinstance(f, ATOMS):
        return f
    if isinstance(f, Exists):
        return Exists(f.var, And(_guard(f.var, lower, upper), _relativize(f.body, lower, upper)))
    if isinstance(f, Forall):
        return Forall(f.var, Implies(_guard(f.var, lower, upper), _relativize(f.body, lower, upper)))
    if isinstance(f, SET_QUANTIFIERS):
        return type(f)(f.var, _relativize(f.body, lower, upper))
    if isinstance(f, Not):
        return Not(_relativize(f.body, lower, upper))
    return type(f)(_relativize(f.left, lower, upper), _relativize(f.right, lower, upper))


def transform_er(f: Formula, sig: Signature) -> Formula:
    """Eliminate the expansion predicate from a sentence.

    Returns ``E x. (A y. x <= y) & f*`` where ``f*`` replaces each ``H(z)`` by
    ``z = x``.  On a finite segment whose only H-element is its minimum the
    result (which no longer mentions H) is equivalent to ``f``.
    """
    if sig.expansion_name is None:
        raise FormulaError("signature has no expansion predicate")
    if free_variables(f):
        raise FormulaError("transform_er expects a sentence")
    taken = all_variables(f)
    x = fresh_name(taken, "x")
    y = fresh_name(taken | {x}, "y")
    star = _replace_h(f, sig.expansion_name, x)
    return Exists(x, And(Forall(y, Le(x, y)), star))


def _replace_h(f, h, x):
    if isinstance(f, Pred):
        return Eq(f.x, x) if f.name == h else f
    if isinstance(f, ATOMS):
        return f
    if isinstance(f, QUANTIFIERS):
        return type(f)(f.var, _replace_h(f.body, h, x))
    if isinstance(f, Not):
        return Not(_replace_h(f.body, h, x))
    return type(f)(_replace_h(f.left, h, x), _replace_h(f.right, h, x))


# ---------------------------------------------------------------------------
# Brute-force evaluation on finite words


@dataclass(frozen=True)
class FiniteModel:
    word: tuple[int, ...]
    sig: Signature
    assignment: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        size = len(self.word)
        for name, val in self.assignment.items():
            if is_point_var(name):
                if not (isinstance(val, int) and 0 <= val < size):
                    raise FormulaError(f"position {val!r} for {name} outside word")
            else:
                if any(not (0 <= p < size) for p in val):
                    raise FormulaError(f"set {name} has positions outside word")


def word_from_bits(text: str, n: int) -> tuple[int, ...]:
    """Decode a word written as concatenated fixed-width bit groups.

    With ``n == 0`` each letter is written as ``.``.
    """
    if n == 0:
        if set(text) - {"."}:
            raise ValueError(f"letters over the empty alphabet are written '.', got {text!r}")
        return (0,) * len(text)
    if len(text) % n or set(text) - {"0", "1"}:
        raise ValueError(f"{text!r} is not a sequence of {n}-bit groups")
    out = []
    for i in range(0, len(text), n):
        group = text[i:i + n]
        out.append(sum(1 << j for j, ch in enumerate(group) if ch == "1"))
    return tuple(out)


def word_to_bits(word: Sequence[int], n: int) -> str:
    if n == 0:
        return "." * len(word)
    return "".join("".join("1" if (a >> j) & 1 else "0" for j in range(n)) for a in word)


def eval_finite(f: Formula, m: FiniteModel) -> bool:
    """Standard MSO satisfaction; set quantifiers range over all subsets."""
    missing = free_variables(f) - set(m.assignment)
    if missing:
        raise UnboundVariableError(f"unassigned free variables: {sorted(missing)}")
    env = {k: (v if is_point_var(k) else frozenset(v)) for k, v in m.assignment.items()}
    return _eval(f, m.word, m.sig, env)


def _eval(f, word, sig, env) -> bool:
    if isinstance(f, Lt):
        return env[f.x] < env[f.y]
    if isinstance(f, Le):
        return env[f.x] <= env[f.y]
    if isinstance(f, Eq):
        return env[f.x] == env[f.y]
    if isinstance(f, Pred):
        return bool((word[env[f.x]] >> sig.index(f.name)) & 1)
    if isinstance(f, In):
        return env[f.x] in env[f.X]
    if isinstance(f, Not):
        return not _eval(f.body, word, sig, env)
    if isinstance(f, And):
        return _eval(f.left, word, sig, env) and _eval(f.right, word, sig, env)
    if isinstance(f, Or):
        return _eval(f.left, word, sig, env) or _eval(f.right, word, sig, env)
    if isinstance(f, Implies):
        return (not _eval(f.left, word, sig, env)) or _eval(f.right, word, sig, env)
    if isinstance(f, POINT_QUANTIFIERS):
        results = (_eval(f.body, word, sig, {**env, f.var: p}) for p in range(len(word)))
        return any(results) if isinstance(f, Exists) else all(results)
    if isinstance(f, SET_QUANTIFIERS):
        subsets = (
            frozenset(s)
            for r in range(len(word) + 1)
            for s in itertools.combinations(range(len(word)), r)
        )
        results = (_eval(f.body, word, sig, {**env, f.var: s}) for s in subsets)
        return any(results) if isinstance(f, ExistsSet) else all(results)
    raise FormulaError(f"unknown node {f!r}")
