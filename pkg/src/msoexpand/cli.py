"""Command-line driver.

Every report is a sequence of ``KEY: value`` lines, except ``decide`` and
``recurrence`` which print their verdict alone.  Exit status: 0 success,
1 bad input, 2 exhausted budget, 3 unsupported presentation.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from typing import Sequence

from . import catalog
from .errors import MsoError, ResourceError, UnsupportedPresentationError
from .formula import parse
from .omega import (
    OmegaPresentation,
    build_uniform_homog,
    decide,
    expand,
    indistinguishability_check,
    structure_type,
)
from .scattered import (
    BackOmega,
    SumPresentation,
    decide_class,
    decide_scattered,
    expand_scattered,
    generalized_sum_type,
    normalize_classes,
)
from .specfile import StructureSpec, expansion_recipe, load
from .types import KType, TypeTable
from .zeta import (
    ZetaPresentation,
    classify_recurrence,
    decide_zeta,
    expand_nonrecurrent,
    expand_recurrent,
    indistinguishable_zeta,
    structure_type_zeta,
)

EXIT_OK, EXIT_INPUT, EXIT_RESOURCE, EXIT_UNSUPPORTED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# Loading and expansion


def _expand_presentation(spec: StructureSpec, K: int, tt: TypeTable):
    """Expanded presentation and a short description of the route taken."""
    p, b = spec.presentation, spec.budget
    if isinstance(p, OmegaPresentation):
        return expand(p, b, tt, K), "omega-homogeneous"
    if isinstance(p, ZetaPresentation):
        verdict = classify_recurrence(p)
        if verdict.recurrent:
            return expand_recurrent(p, b), "zeta-recurrent"
        return expand_nonrecurrent(p, verdict.defect, b, tt, K), f"zeta-nonrecurrent c={verdict.defect}"
    if isinstance(p, SumPresentation):
        result = expand_scattered(p, b, tt)
        return result.presentation, f"sum case {result.case}"
    if isinstance(p, BackOmega):
        return BackOmega(expand(p.ray, b, tt, K)), "back-omega-homogeneous"
    raise UnsupportedPresentationError(f"cannot expand a {spec.kind} structure")


def _load(args, tt: TypeTable) -> StructureSpec:
    spec = load(args.spec)
    overrides = {k: getattr(args, k) for k in ("horizon", "steps", "events") if getattr(args, k) is not None}
    if overrides:
        spec.budget = dataclasses.replace(spec.budget, **overrides)
    if spec.expansion_levels is not None:
        q, _ = _expand_presentation(spec, spec.expansion_levels, tt)
        spec = dataclasses.replace(spec, sig=q.sig, presentation=q)
    return spec


def _structure_type(spec: StructureSpec, k: int, tt: TypeTable) -> KType:
    p, b = spec.presentation, spec.budget
    if isinstance(p, OmegaPresentation):
        return structure_type(p, k, b, tt)
    if isinstance(p, ZetaPresentation):
        return structure_type_zeta(p, k, b, tt)
    if isinstance(p, SumPresentation):
        return generalized_sum_type(normalize_classes(p), k, b, tt)
    if isinstance(p, BackOmega):
        return tt.reverse(structure_type(p.ray, k, b, tt))
    raise UnsupportedPresentationError(f"no type for a {spec.kind} structure")


def _read_formula(args) -> str:
    if args.formula is not None:
        return args.formula
    try:
        with open(args.formula_file, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise MsoError(f"cannot read formula file: {e}") from None


# ---------------------------------------------------------------------------
# Subcommands


def cmd_decide(args, tt: TypeTable, out) -> None:
    spec = _load(args, tt)
    f = parse(_read_formula(args), spec.sig)
    p, b = spec.presentation, spec.budget
    if isinstance(p, OmegaPresentation):
        verdict = decide(p, f, b, tt)
    elif isinstance(p, ZetaPresentation):
        verdict = decide_zeta(p, f, b, tt)
    elif isinstance(p, SumPresentation):
        verdict = decide_scattered(p, f, b, tt)
    else:
        verdict = decide_class(p, f, b, tt)
    print("TRUE" if verdict else "FALSE", file=out)


def cmd_type(args, tt: TypeTable, out) -> None:
    spec = _load(args, tt)
    t = _structure_type(spec, args.k, tt)
    qd = min(args.k, 2)
    texts = catalog.sentences(spec.sig, qd)
    true = [i for i, f in enumerate(texts) if tt.holds(t, f, spec.sig)]
    print(f"ID: {t.id}", file=out)
    print(f"LEVEL: {t.level}", file=out)
    print(f"WIDTH: {t.width}", file=out)
    print(f"POINT_EXTENSIONS: {len(t.points)}", file=out)
    print(f"SET_EXTENSIONS: {len(t.sets)}", file=out)
    print(f"REGISTRY_SIZE: {len(tt)}", file=out)
    print(f"CATALOG_TRUE: {len(true)}/{len(texts)}", file=out)
    print(f"CATALOG_TRUE_INDICES: {' '.join(map(str, true))}", file=out)


def cmd_expand(args, tt: TypeTable, out) -> None:
    spec = _load(args, tt)
    if spec.expansion_levels is not None:
        raise MsoError("structure is already an expansion")
    q, route = _expand_presentation(spec, args.levels, tt)
    notes = [f"route: {route}"]
    if isinstance(q, OmegaPresentation):
        h = [i for i in range(args.preview) if q.letter(i) >> q.sig.n & 1]
        notes.append(f"H below {args.preview}: {' '.join(map(str, h))}")
    text = expansion_recipe(spec, args.levels, notes)
    try:
        with open(args.output, "w", encoding="ascii") as fh:
            fh.write(text)
    except OSError as e:
        raise MsoError(f"cannot write {args.output}: {e}") from None
    print(f"ROUTE: {route}", file=out)
    print(f"SIGNATURE: {' '.join(q.sig.predicate_names + (q.sig.expansion_name,))}", file=out)
    print(f"WROTE: {args.output}", file=out)


def cmd_homog(args, tt: TypeTable, out) -> None:
    spec = _load(args, tt)
    p = spec.presentation
    if not isinstance(p, OmegaPresentation):
        raise UnsupportedPresentationError("homogeneous chains are built for omega-words only")
    if args.k < 1:
        raise MsoError("-k must be at least 1")
    hs = build_uniform_homog(p, args.k, spec.budget, tt, check=args.m if args.verify else 0)
    print(f"H: {' '.join(map(str, hs.elements(args.m)))}", file=out)
    for k in range(1, args.k + 1):
        elems = ' '.join(map(str, hs.level_elements(k, args.m)))
        print(f"LEVEL_{k}: idempotent={hs.idempotents[k].id} elements={elems}", file=out)


def cmd_recurrence(args, tt: TypeTable, out) -> None:
    spec = _load(args, tt)
    if not isinstance(spec.presentation, ZetaPresentation):
        raise UnsupportedPresentationError("recurrence is defined for two-sided words")
    print(classify_recurrence(spec.presentation), file=out)


def cmd_distinguish(args, tt: TypeTable, out) -> None:
    spec = _load(args, tt)
    p = spec.presentation
    if isinstance(p, OmegaPresentation):
        same = indistinguishability_check(p, args.a, args.b, args.k, tt, spec.budget)
    elif isinstance(p, ZetaPresentation):
        same = indistinguishable_zeta(p, args.a, args.b, args.k, spec.budget, tt)
    else:
        raise UnsupportedPresentationError("positions are compared on omega- and two-sided words only")
    print(f"INDISTINGUISHABLE: {'TRUE' if same else 'FALSE'}", file=out)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="msoexpand", description="MSO decisions and decidable expansions of linear orders.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=func)
        sp.add_argument("-s", "--spec", required=True, help="structure-spec file")
        sp.add_argument("--k-max", type=int, default=3, help="largest type level (default 3)")
        sp.add_argument("--horizon", type=int, help="override the search horizon")
        sp.add_argument("--steps", type=int, help="override the gap-period search length")
        sp.add_argument("--events", type=int, help="override the event budget")
        return sp

    sp = command("decide", cmd_decide, "decide a sentence")
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("-f", "--formula", help="sentence text")
    group.add_argument("-F", "--formula-file", help="file holding the sentence")

    sp = command("type", cmd_type, "print the k-type of the structure")
    sp.add_argument("-k", type=int, required=True)

    sp = command("expand", cmd_expand, "write the expansion by a fresh predicate H")
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--levels", type=int, default=2, help="homogeneity levels (default 2)")
    sp.add_argument("--preview", type=int, default=200, help="range of H listed in the comments")

    sp = command("homog", cmd_homog, "print the diagonal of the homogeneous chains")
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("-m", type=int, required=True)
    sp.add_argument("--verify", action="store_true", help="recheck homogeneity on the listed elements")

    command("recurrence", cmd_recurrence, "classify a two-sided word")

    sp = command("distinguish", cmd_distinguish, "compare the k-types of two positions")
    sp.add_argument("-a", type=int, required=True)
    sp.add_argument("-b", type=int, required=True)
    sp.add_argument("-k", type=int, required=True)
    return parser


def run_command(argv: Sequence[str], out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    try:
        args = build_parser().parse_args(list(argv))
    except _UsageError as e:
        print(f"ERROR: {e}", file=err)
        return EXIT_INPUT
    tt = TypeTable(k_max=args.k_max)
    try:
        args.func(args, tt, out)
    except ResourceError as e:
        print(f"ERROR: resource budget exceeded: {e}", file=err)
        return EXIT_RESOURCE
    except UnsupportedPresentationError as e:
        print(f"ERROR: unsupported presentation: {e}", file=err)
        return EXIT_UNSUPPORTED
    except (MsoError, ValueError) as e:
        print(f"ERROR: {e}", file=err)
        return EXIT_INPUT
    return EXIT_OK


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))
