"""Finite element solvers for the variable-exponent fractional diffusion-wave equation."""

from .exponent import (
    ConstantExponent,
    ExponentFunction,
    PolyOffsetExponent,
    SineOffsetExponent,
    SmoothedExponent,
    TransitionExponent,
    eval_alpha,
    eval_g,
    g_quadrature,
    make_transition_exponent,
    smooth_exponent,
)
from .fem import FemSpace, Mesh, assemble, l2_inner, l2_norm, ritz_project, solve_spd
from .quadrature import GQuadrature, gauss_jacobi_rule
from .schemes import (
    ALPHA0,
    SECOND_ORDER,
    InitialDatum,
    ProblemSpec,
    SolutionHistory,
    Source,
    run,
)
from .weights import WeightTables, build_tables

__all__ = [
    "ALPHA0",
    "SECOND_ORDER",
    "ConstantExponent",
    "ExponentFunction",
    "FemSpace",
    "GQuadrature",
    "InitialDatum",
    "Mesh",
    "PolyOffsetExponent",
    "ProblemSpec",
    "SineOffsetExponent",
    "SmoothedExponent",
    "SolutionHistory",
    "Source",
    "TransitionExponent",
    "WeightTables",
    "assemble",
    "build_tables",
    "eval_alpha",
    "eval_g",
    "g_quadrature",
    "gauss_jacobi_rule",
    "l2_inner",
    "l2_norm",
    "make_transition_exponent",
    "ritz_project",
    "run",
    "smooth_exponent",
    "solve_spd",
]

__version__ = "0.1.0"
