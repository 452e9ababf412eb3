"""Nested sequent calculi for quantified modal logics with equality and
inner/outer domains: proof search, proof checking, counter-models and
proof transformations."""

from .syntax import (
    Term, Var, Const, Formula, Atom, NegAtom, Eq, Neq, Or, And, Exists, Forall,
    Dia, Box, negate, length, substitute, free_vars, format_formula,
)
from .parsing import ParseError, parse_formula, parse_term
from .grammar import Char, FWD, BWD, SigmaSystem, build_sigma_system, derives, classify_extension
from .reachability import PropGraph, Language, reachable
from .sequent import NestedSequent, parse_sequent, format_sequent, fm
from .semantics import FrameConditions, Model, Assignment, satisfies, satisfies_sequent, check_frame
from .calculus import CalculusConfig, RuleInstance, Proof, check_proof
from .search import SearchBudget, Proved, Refuted, Unknown, prove

__version__ = "0.1.0"

__all__ = [
    "Term", "Var", "Const", "Formula", "Atom", "NegAtom", "Eq", "Neq", "Or", "And",
    "Exists", "Forall", "Dia", "Box", "negate", "length", "substitute", "free_vars",
    "format_formula", "ParseError", "parse_formula", "parse_term", "Char", "FWD", "BWD",
    "SigmaSystem", "build_sigma_system", "derives", "classify_extension", "PropGraph",
    "Language", "reachable", "NestedSequent", "parse_sequent", "format_sequent", "fm",
    "FrameConditions", "Model", "Assignment", "satisfies", "satisfies_sequent",
    "check_frame", "CalculusConfig", "RuleInstance", "Proof", "check_proof",
    "SearchBudget", "Proved", "Refuted", "Unknown", "prove",
]
