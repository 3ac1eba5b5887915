"""Reading and writing structure-spec files.

Format: one ``key: value`` per line, ``#`` starts a comment, and
``[section]`` headers open the ``[component NAME]``, ``[budget]`` and
``[expansion]`` sections.  Words are written as concatenated groups of
``n`` bits (``P1`` first), or with one ``.`` per letter when ``n = 0``.

Top level keys::

    signature: P1 P2          # predicate names, may be empty
    structure: <form>

Structure forms::

    lasso:<prefix>:<period>           omega-word u v v v ...
    generator                         omega-word; one line "P1: <builtin>" per predicate
    back:<omega form>                 backwards ray (for generator, predicate lines follow)
    periodic:<word>[:<phase>]         two-sided periodic word
    bilasso:<uL>:<v>:<uR>             two-sided ...uL uL v uR uR ...
    finite:<word>                     finite word (sum components only)
    sum                               with "index: a b c" or "index: lasso(a b; c d)"

Generator builtins: ``factorial``, ``power:<b>``, ``upbits:<prefix>:<period>``
(plain 0/1 strings), ``finite:<p1,p2,...>`` and ``empty``.

An ``[expansion]`` section (``levels: K``) marks the file as the recipe of
the expansion of the structure above it by a fresh predicate ``H``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from .errors import SpecFileError
from .formula import Signature, word_from_bits, word_to_bits
from .omega import OmegaPresentation, SearchBudget, generator, lasso
from .scattered import BackOmega, FiniteWord, SumPresentation
from .zeta import BiLasso, Periodic, ZetaPresentation

_SECTION = re.compile(r"^\[\s*(component\s+(\S+)|budget|expansion)\s*\]$")

Presentation = Union[OmegaPresentation, ZetaPresentation, SumPresentation, BackOmega, FiniteWord]


@dataclass
class StructureSpec:
    sig: Signature
    presentation: Presentation
    budget: SearchBudget = field(default_factory=SearchBudget)
    expansion_levels: int | None = None
    text: str = ""

    @property
    def kind(self) -> str:
        if isinstance(self.presentation, OmegaPresentation):
            return "omega"
        if isinstance(self.presentation, ZetaPresentation):
            return "zeta"
        if isinstance(self.presentation, SumPresentation):
            return "sum"
        if isinstance(self.presentation, BackOmega):
            return "back"
        return "finite"


def _parse_lines(text: str):
    sections: list[tuple[str, str | None, dict[str, str]]] = [("top", None, {})]
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            if m.group(2):
                sections.append(("component", m.group(2), {}))
            else:
                sections.append((m.group(1), None, {}))
            continue
        if ":" not in line:
            raise SpecFileError(f"line {lineno}: expected 'key: value', got {raw!r}")
        key, value = line.split(":", 1)
        key = key.strip()
        entries = sections[-1][2]
        if key in entries:
            raise SpecFileError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value.strip()
    return sections


def _word(text: str, sig: Signature) -> tuple[int, ...]:
    try:
        return word_from_bits(text, sig.width)
    except ValueError as e:
        raise SpecFileError(str(e)) from None


def _structure(form: str, entries: dict[str, str], sig: Signature, components=None) -> Presentation:
    parts = form.split(":")
    kind = parts[0].strip()
    try:
        if kind == "lasso" and len(parts) == 3:
            period = _word(parts[2], sig)
            if not period:
                raise SpecFileError("lasso period must be nonempty")
            return lasso(_word(parts[1], sig), period, sig)
        if kind == "generator" and len(parts) == 1:
            missing = [n for n in sig.predicate_names if n not in entries]
            if missing:
                raise SpecFileError(f"generator lacks predicate lines for {missing}")
            return generator(sig, [entries[n] for n in sig.predicate_names])
        if kind == "back" and len(parts) >= 2:
            inner = _structure(":".join(parts[1:]), entries, sig)
            if not isinstance(inner, OmegaPresentation):
                raise SpecFileError("back: expects an omega form")
            return BackOmega(inner)
        if kind == "periodic" and len(parts) in (2, 3):
            phase = int(parts[2]) if len(parts) == 3 else 0
            return Periodic(_word(parts[1], sig), phase, sig)
        if kind == "bilasso" and len(parts) == 4:
            return BiLasso(_word(parts[1], sig), _word(parts[2], sig), _word(parts[3], sig), sig)
        if kind == "finite" and len(parts) == 2:
            return FiniteWord(_word(parts[1], sig), sig)
        if kind == "sum" and len(parts) == 1:
            if components is None:
                raise SpecFileError("nested sums are not supported")
            return _sum(entries.get("index"), components, sig)
    except ValueError as e:
        raise SpecFileError(f"bad structure {form!r}: {e}") from None
    raise SpecFileError(f"unknown structure form {form!r}")


_LASSO_INDEX = re.compile(r"^lasso\((.*);(.*)\)$")


def _sum(index: str | None, components: dict, sig: Signature) -> SumPresentation:
    if not index:
        raise SpecFileError("sum needs an 'index' line")
    m = _LASSO_INDEX.match(index.strip())
    if m:
        prefix, period = m.group(1).split(), m.group(2).split()
        if not period:
            raise SpecFileError("lasso index needs a nonempty period")
    else:
        prefix, period = index.split(), []
    for name in prefix + period:
        if name not in components:
            raise SpecFileError(f"index refers to undeclared component {name!r}")
    return SumPresentation(sig, dict(components), tuple(prefix), tuple(period))


def _signature(entries: dict[str, str]) -> Signature:
    names = entries.get("signature", "").replace(",", " ").split()
    try:
        return Signature(tuple(names))
    except ValueError as e:
        raise SpecFileError(str(e)) from None


def loads(text: str) -> StructureSpec:
    sections = _parse_lines(text)
    top = sections[0][2]
    sig = _signature(top)
    if "structure" not in top:
        raise SpecFileError("missing 'structure' line")
    components = {}
    budget = SearchBudget()
    levels = None
    for kind, name, entries in sections[1:]:
        if kind == "component":
            if name in components:
                raise SpecFileError(f"component {name!r} declared twice")
            if "structure" not in entries:
                raise SpecFileError(f"component {name!r} lacks a 'structure' line")
            components[name] = _structure(entries["structure"], entries, sig)
        elif kind == "budget":
            try:
                budget = SearchBudget(
                    int(entries.get("horizon", budget.horizon)),
                    int(entries.get("steps", budget.steps)),
                    int(entries.get("events", budget.events)),
                )
            except ValueError as e:
                raise SpecFileError(f"bad budget: {e}") from None
        elif kind == "expansion":
            levels = int(entries.get("levels", "2"))
    presentation = _structure(top["structure"], top, sig, components)
    if isinstance(presentation, FiniteWord):
        raise SpecFileError("a finite word is only allowed as a sum component")
    return StructureSpec(sig, presentation, budget, levels, text)


def load(path: str) -> StructureSpec:
    try:
        with open(path, encoding="ascii") as fh:
            return loads(fh.read())
    except (OSError, UnicodeDecodeError) as e:
        raise SpecFileError(f"cannot read {path}: {e}") from None


def format_word(word, sig: Signature) -> str:
    return word_to_bits(word, sig.width)


def expansion_recipe(spec: StructureSpec, levels: int, notes: list[str]) -> str:
    """The spec text plus an ``[expansion]`` section; reloading re-runs the construction."""
    lines = [ln for ln in spec.text.splitlines()]
    out = []
    skipping = False
    for ln in lines:
        stripped = ln.split("#", 1)[0].strip()
        m = _SECTION.match(stripped)
        if m:
            skipping = m.group(1) == "expansion"
        if not skipping:
            out.append(ln)
    while out and not out[-1].strip():
        out.pop()
    out.append("")
    out.append("[expansion]")
    out.append(f"levels: {levels}")
    out.extend(f"# {n}" for n in notes)
    return "\n".join(out) + "\n"
