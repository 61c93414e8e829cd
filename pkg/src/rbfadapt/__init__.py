"""Adaptive approximation of integrals and derivatives on scattered nodes.

Local stencils built from the cubic polyharmonic kernel with polynomial
augmentation give operator weights (quadrature/cubature rules, derivative and
gradient stencils). Extending the polynomial degree on the same stencil by
block elimination yields a cheap a-posteriori error estimate, and an adaptive
driver refines the node set wherever that estimate exceeds a tolerance.
"""

from .basis import MultiIndexBasis, count_monomials, monomial_basis
from .driver import (
    AdaptiveConfig,
    AdaptiveReport,
    evaluate_final,
    run_adaptive,
    static_quadrature,
)
from .geometry import NodeSet, Tessellation, delaunay, initial_grid, nearest_neighbors
from .kernels import (
    Interval,
    Triangle,
    kernel_derivative,
    kernel_eval,
    kernel_moment,
    monomial_moment,
)
from .stencils import (
    Derivative,
    Gradient,
    IntegralOver,
    Stencil,
    WeightPair,
    assemble_system,
    error_estimate,
    extend_weights,
    solve_weights,
    weight_pair,
)
from .testfuncs import TestFunction, make_test_function, reference_function

__version__ = "0.1.0"

__all__ = [
    "AdaptiveConfig",
    "AdaptiveReport",
    "Derivative",
    "Gradient",
    "IntegralOver",
    "Interval",
    "MultiIndexBasis",
    "NodeSet",
    "Stencil",
    "Tessellation",
    "TestFunction",
    "Triangle",
    "WeightPair",
    "assemble_system",
    "count_monomials",
    "delaunay",
    "error_estimate",
    "evaluate_final",
    "extend_weights",
    "initial_grid",
    "kernel_derivative",
    "kernel_eval",
    "kernel_moment",
    "make_test_function",
    "monomial_basis",
    "monomial_moment",
    "nearest_neighbors",
    "reference_function",
    "run_adaptive",
    "solve_weights",
    "static_quadrature",
    "weight_pair",
]
