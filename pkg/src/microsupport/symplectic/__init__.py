"""Scalar fields on ``T*R^n``, Poisson brackets and involutivity checks."""
from .expr import Const, Expr, Var
from .field import ScalarField, apply_vector, hamiltonian_vector, poisson_bracket
from .involutivity import BracketReport, remark_ss0, strong_involutivity_demo, weak_involutivity_check
from .parse import parse_expr, parse_infix, parse_prefix

__all__ = [
    "BracketReport",
    "Const",
    "Expr",
    "ScalarField",
    "Var",
    "apply_vector",
    "hamiltonian_vector",
    "parse_expr",
    "parse_infix",
    "parse_prefix",
    "poisson_bracket",
    "remark_ss0",
    "strong_involutivity_demo",
    "weak_involutivity_check",
]
