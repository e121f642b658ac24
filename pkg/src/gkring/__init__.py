"""Grothendieck classes of definable sets over pairing functions without cycles."""

from .decomposition import (
    Decomposition,
    ElementaryPiece,
    decompose,
    make_elementary,
    tree_of_decomposition,
    tree_stats,
    verify_elementary,
)
from .diagram import GENERIC, ParamDiagram
from .errors import GkError
from .functions import (
    NormalFormula,
    PiecewiseFunction,
    adapted_decomposition,
    catalog,
    check_function,
    extend_to,
    image_of_simple,
    injective_on,
    validate_normal,
)
from .grothendieck import Cardinality, cardinality, class_of_formula, satisfiable
from .k0 import ONE, X, ZERO, K0Elem
from .oracle import oracle_cardinality, oracle_class, oracle_count, oracle_sat
from .primitive import (
    analyze_parametric,
    classify_primitive,
    find_closed_subtree,
    skeleton,
    tree_of_primitive,
)
from .simple import ClosedSet, SimpleSet, irreducible_components
from .syntax import pack_variables, parse, to_text

__all__ = [
    "Cardinality",
    "ClosedSet",
    "Decomposition",
    "ElementaryPiece",
    "GENERIC",
    "GkError",
    "K0Elem",
    "NormalFormula",
    "ONE",
    "ParamDiagram",
    "PiecewiseFunction",
    "SimpleSet",
    "X",
    "ZERO",
    "adapted_decomposition",
    "analyze_parametric",
    "cardinality",
    "catalog",
    "check_function",
    "class_of_formula",
    "classify_primitive",
    "decompose",
    "extend_to",
    "find_closed_subtree",
    "image_of_simple",
    "injective_on",
    "irreducible_components",
    "make_elementary",
    "oracle_cardinality",
    "oracle_class",
    "oracle_count",
    "oracle_sat",
    "pack_variables",
    "parse",
    "satisfiable",
    "skeleton",
    "to_text",
    "tree_of_decomposition",
    "tree_of_primitive",
    "tree_stats",
    "validate_normal",
    "verify_elementary",
]
