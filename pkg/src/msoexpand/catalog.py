"""A fixed catalog of test sentences.

Sentences that talk about a unary predicate are written with the
placeholder ``Q``, which is replaced by ``P1`` or by the expansion
predicate depending on the signature.
"""

from __future__ import annotations

from .formula import Formula, Signature, parse

# qd <= 2, no predicates
ORDER_SENTENCES = (
    "E x. x = x",
    "A x. x = x",
    "E x. A y. x <= y",
    "E x. A y. y <= x",
    "E x. E y. x < y",
    "A x. E y. x < y",
    "A x. E y. y < x",
    "A x. A y. (x <= y | y <= x)",
    "A x. A y. x = y",
    "E x. E y. ~x = y",
    "A x. E y. (x < y | y < x)",
    "~E x. A y. (x <= y & y <= x)",
    "E2 X. A x. x in X",
    "E2 X. E x. ~x in X",
    "A2 X. E x. x in X",
    "E2 X. (E x. x in X) & (E y. ~y in X)",
    "A2 X. (E x. x in X) | (A y. ~y in X)",
    "A2 X. E x. (x in X | ~x in X)",
    "E2 X. A x. (x in X -> E y. y < x)",
    "A x. (E y. x < y) -> (E z. z < x)",
)

# qd <= 2, one predicate written Q
PREDICATE_SENTENCES = (
    "E x. Q(x)",
    "A x. Q(x)",
    "E x. ~Q(x)",
    "~E x. Q(x)",
    "E x. (Q(x) & A y. (Q(y) -> x <= y))",
    "E x. A y. (x <= y & Q(x))",
    "E x. A y. (y <= x & Q(x))",
    "A x. (Q(x) -> E y. (x < y & ~Q(y)))",
    "E x. E y. (x < y & Q(x) & Q(y))",
    "A x. A y. (Q(x) & Q(y) -> x = y)",
    "E x. E y. (x < y & Q(x) & ~Q(y))",
    "E x. E y. (x < y & ~Q(x) & Q(y))",
    "A x. (Q(x) -> A y. (x < y -> Q(y)))",
    "E2 X. A x. ((x in X -> Q(x)) & (Q(x) -> x in X))",
    "E2 X. (E x. x in X) & (A y. (y in X -> Q(y)))",
    "A2 X. (A x. (x in X -> Q(x))) | (E y. (y in X & ~Q(y)))",
    "E2 X. E x. (x in X & ~Q(x))",
    "A x. E y. (y <= x & Q(y))",
    "E x. (~Q(x) & A y. (y < x -> Q(y)))",
    "A x. A y. (x < y -> Q(x) | Q(y))",
    "E x. A y. (x < y -> ~Q(y))",
    "A x. (~Q(x) -> E y. (y < x & Q(y)))",
    "E x. E y. (~x = y & ~Q(x) & ~Q(y))",
    "A x. (Q(x) | E y. y < x)",
    "A x. (Q(x) -> E y. (x < y & Q(y)))",
    "A x. E y. (x < y & Q(y))",
)

# qd 3, no predicates
DEEP_ORDER_SENTENCES = (
    "A x. E y. (x < y & ~E z. (x < z & z < y))",
    "E x. E y. E z. (x < y & y < z)",
    "E2 X. (E x. x in X) & (A x. (x in X -> E y. (x < y & y in X)))",
    "A x. (E y. y < x) -> E y. (y < x & ~E z. (y < z & z < x))",
    "E x. A y. (x <= y & E z. x < z)",
)

# qd 3, one predicate (cheap enough on sparse words)
DEEP_PREDICATE_SENTENCES = (
    "A x. (Q(x) -> E y. (x < y & Q(y) & ~E z. (x < z & z < y & Q(z))))",
    "E x. (Q(x) & A y. (y < x -> E z. (y < z & z < x)))",
)


def _fill(texts, name):
    return tuple(t.replace("Q(", f"{name}(") for t in texts)


def sentence_texts(sig: Signature, max_qd: int = 2) -> tuple[str, ...]:
    """Catalog sentences that make sense over ``sig``."""
    out = list(ORDER_SENTENCES)
    names = list(sig.predicate_names)
    if sig.expansion_name is not None:
        names.append(sig.expansion_name)
    for name in names:
        out.extend(_fill(PREDICATE_SENTENCES, name))
    if max_qd >= 3:
        out.extend(DEEP_ORDER_SENTENCES)
        for name in names:
            out.extend(_fill(DEEP_PREDICATE_SENTENCES, name))
    if len(names) >= 2:
        a, b = names[0], names[-1]
        out.extend((
            f"E x. ({a}(x) & {b}(x))",
            f"A x. ({b}(x) -> {a}(x))",
            f"E x. ({b}(x) & A y. ({a}(y) -> x < y))",
        ))
    return tuple(out)


def sentences(sig: Signature, max_qd: int = 2) -> list[Formula]:
    return [f for f in (parse(t, sig) for t in sentence_texts(sig, max_qd)) if f.qd <= max_qd]
