"""Decide MSO sentences over presented labelled linear orders and build
decidable expansions of them by a fresh unary predicate."""

from .errors import (
    FormulaError,
    FormulaSyntaxError,
    MsoError,
    ResourceError,
    SpecFileError,
    TypeMismatchError,
    UnboundVariableError,
    UnknownPredicateError,
    UnsupportedPresentationError,
)
from .formula import Signature, eval_finite, parse, relativize, transform_er
from .omega import OmegaPresentation, SearchBudget, decide, expand, generator, lasso
from .scattered import BackOmega, FiniteWord, SumPresentation, decide_scattered, expand_scattered
from .types import TypeTable, compose_sum, omega_power, reverse_type, type_of_word
from .zeta import bilasso, classify_recurrence, decide_zeta, expand_recurrent, periodic

__all__ = [
    "BackOmega", "FiniteWord", "FormulaError", "FormulaSyntaxError", "MsoError",
    "OmegaPresentation", "ResourceError", "SearchBudget", "Signature", "SpecFileError",
    "SumPresentation", "TypeMismatchError", "TypeTable", "UnboundVariableError",
    "UnknownPredicateError", "UnsupportedPresentationError", "bilasso",
    "classify_recurrence", "compose_sum", "decide", "decide_scattered", "decide_zeta",
    "eval_finite", "expand", "expand_recurrent", "expand_scattered", "generator", "lasso",
    "omega_power", "parse", "periodic", "relativize", "reverse_type", "transform_er",
    "type_of_word",
]
