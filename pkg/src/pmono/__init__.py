"""p-monotone operators in finite dimension: decision procedures,
Fitzpatrick functions of order p, polars, maximal extensions, product
operators and adjoints."""

from .finite_op import (FiniteOperator, Pair, cyclic_sum, fitzpatrick_inf,
                        fitzpatrick_p, inverse_cyclic_sum,
                        is_cyclically_monotone, is_p_monotone,
                        polar_membership)
from .linear_rel import (AffineRelation, LinearRelation, adjoint,
                         is_maximal_p_monotone_linear, is_monotone_linear,
                         is_p_monotone_linear, maximalize,
                         polar_membership_linear)
from .subspace import Subspace, span
from .verdict import Decision, Verdict

__version__ = "0.1.0"

__all__ = [
    "AffineRelation", "Decision", "FiniteOperator", "LinearRelation", "Pair",
    "Subspace", "Verdict", "adjoint", "cyclic_sum", "fitzpatrick_inf",
    "fitzpatrick_p", "inverse_cyclic_sum", "is_cyclically_monotone",
    "is_maximal_p_monotone_linear", "is_monotone_linear", "is_p_monotone",
    "is_p_monotone_linear", "maximalize", "polar_membership",
    "polar_membership_linear", "span",
]
