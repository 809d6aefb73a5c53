"""Normal forms of Clifford (quaternionic) bracket polynomials in 3D, checked by exact evaluation."""
from .core import (
    BracketFactor,
    BracketPolynomial,
    BracketTerm,
    CliffordBracketError,
    ContextError,
    DomainError,
    InternalError,
    Tableau,
    VariableContext,
    VVMonomial,
    VVPolynomial,
    bracket_leader,
    expand,
    orient_brackets,
)
from .gbasis import RuleSet, generate, is_normal_shape, reduce
from .oracle import check_zero, eval_poly
from .parser import ParseError, parse, to_json, to_text
from .straighten import caianiello_expand, is_straight, straighten, to_tableau
from .unibracket import generate_BG, to_unibracket, unibracket_normal_form

__all__ = [
    "BracketFactor",
    "BracketPolynomial",
    "BracketTerm",
    "CliffordBracketError",
    "ContextError",
    "DomainError",
    "InternalError",
    "ParseError",
    "RuleSet",
    "Tableau",
    "VVMonomial",
    "VVPolynomial",
    "VariableContext",
    "bracket_leader",
    "caianiello_expand",
    "check_zero",
    "eval_poly",
    "expand",
    "generate",
    "generate_BG",
    "is_normal_shape",
    "is_straight",
    "orient_brackets",
    "parse",
    "reduce",
    "straighten",
    "to_json",
    "to_tableau",
    "to_text",
    "to_unibracket",
    "unibracket_normal_form",
]
