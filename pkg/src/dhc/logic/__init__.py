"""Spatial traffic-rule formulas: syntax, exact evaluation, and a grid oracle."""

from .evaluate import EvaluationError, Evaluator, evaluate, explain, split_candidates
from .formula import (
    And, ApproachDistance, CarId, Chop, Const, Cs, Exists, FalseF, Forall, Formula, Free,
    LengthGE, Not, Ob, Or, Pa, Pc, Re, Sg, Size, Somewhere, TrueF, Var,
    chop_depth, conjuncts, free_variables, safe_gap_on_junction,
)
from .oracle import evaluate_oracle
from .parser import FormulaSyntaxError, UnboundVariableError, parse_formula
from .printer import pretty
from .search import satisfiable_in_universe

__all__ = [
    "And", "ApproachDistance", "CarId", "Chop", "Const", "Cs", "EvaluationError",
    "Evaluator", "Exists", "FalseF", "Forall", "Formula", "FormulaSyntaxError", "Free",
    "LengthGE", "Not", "Ob", "Or", "Pa", "Pc", "Re", "Sg", "Size", "Somewhere", "TrueF",
    "UnboundVariableError", "Var", "chop_depth", "conjuncts", "evaluate", "evaluate_oracle",
    "explain", "free_variables", "parse_formula", "pretty", "safe_gap_on_junction",
    "satisfiable_in_universe", "split_candidates",
]
