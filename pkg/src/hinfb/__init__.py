"""Constrained Nevanlinna-Pick interpolation in H-infinity_B = C + B H-infinity."""

from .blaschke import BlaschkeProduct, divides, evaluate, gcd, lcm, mobius
from .constrained import ConstrainedFunction
from .cstar import commutant, envelope_report, generators, star_algebra_closure
from .feasibility import (
    SearchConfig,
    SweepVerdict,
    classical_pick,
    constrained_pick_matrix,
    feasibility_sweep,
    matrix_pick_sweep,
)
from .ideal import construct_interpolant, dependence_check, ideal_structure, idempotents, separating_function
from .lattice import InvariantSubspace, canonical_form, decomposition_consistency, join, meet
from .modelspace import Label, ModelVector, constrained_kernel, eval_label, grammian, inner_product, model_basis, szego
from .problem import InterpolationProblem
from .quotient import (
    QuotientElement,
    build_compression,
    is_contraction,
    matrix_gap_search,
    mfstar_matrix,
    mfstar_on_label,
    quotient_norm,
    rho,
)

__all__ = [
    "BlaschkeProduct",
    "ConstrainedFunction",
    "InterpolationProblem",
    "InvariantSubspace",
    "Label",
    "ModelVector",
    "QuotientElement",
    "SearchConfig",
    "SweepVerdict",
    "build_compression",
    "canonical_form",
    "classical_pick",
    "commutant",
    "constrained_kernel",
    "constrained_pick_matrix",
    "construct_interpolant",
    "decomposition_consistency",
    "dependence_check",
    "divides",
    "envelope_report",
    "eval_label",
    "evaluate",
    "feasibility_sweep",
    "gcd",
    "generators",
    "grammian",
    "ideal_structure",
    "idempotents",
    "inner_product",
    "is_contraction",
    "join",
    "lcm",
    "matrix_gap_search",
    "matrix_pick_sweep",
    "meet",
    "mfstar_matrix",
    "mfstar_on_label",
    "mobius",
    "model_basis",
    "quotient_norm",
    "rho",
    "separating_function",
    "star_algebra_closure",
    "szego",
]
