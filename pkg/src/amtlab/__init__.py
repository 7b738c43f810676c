"""Numerical laboratory for sharp exponential-integrability inequalities of
Adams type with a lower-order L2 shift, in even dimension 2m."""

from .constants import DimensionContext, ExactConstant, build_context, compute_i_m
from .bubble import build_ladder, eta0
from .greens import GreenFunction, solve_green
from .testfn import TestFunction, assemble_test_function, evaluate_threshold_gap
from .extremal import ExtremalSolution, ProblemConfig, maximize_subcritical

__version__ = "0.1.0"

__all__ = [
    "DimensionContext",
    "ExactConstant",
    "ExtremalSolution",
    "GreenFunction",
    "ProblemConfig",
    "TestFunction",
    "assemble_test_function",
    "build_context",
    "build_ladder",
    "compute_i_m",
    "eta0",
    "evaluate_threshold_gap",
    "maximize_subcritical",
    "solve_green",
]
