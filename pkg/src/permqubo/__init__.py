"""QUBO encodings of permutations built from sorting networks."""
from ._backend import BACKEND
from .encodings import (
    Encoding,
    Recipe,
    build,
    commute_constraint,
    compose_constraint,
    conjugate_constraint,
    constrain_value,
    derangement,
    fixed_point,
    forbid_perm,
    forbid_value,
    involution_constraint,
    match_encoding,
    order_constraint,
    parity_constraint,
    perm_encoding,
    perm_matrix_encoding,
    power_identity_constraint,
)
from .poly import QuadPoly, VariableRegistry, poly_eval

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Encoding", "QuadPoly", "Recipe", "VariableRegistry", "build",
    "commute_constraint", "compose_constraint", "conjugate_constraint", "constrain_value",
    "derangement", "fixed_point", "forbid_perm", "forbid_value", "involution_constraint",
    "match_encoding", "order_constraint", "parity_constraint", "perm_encoding",
    "perm_matrix_encoding", "poly_eval", "power_identity_constraint",
]
