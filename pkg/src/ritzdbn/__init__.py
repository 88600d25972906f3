"""Shallow ReLU Ritz method for 1D diffusion with damped block Newton solvers."""

from .adaptive import IndicatorSet, adbn_solve, local_indicators, mark, recover_flux
from .baselines import FemSolution, afem_solve, bfgs_solve, fem_solve
from .dbn import (DbnState, NeuronClassification, classify, compute_g, dbn_solve,
                  gradient_b, line_search, newton_direction, redistribute)
from .errors import RitzError
from .linear import (StiffnessData, apply_stiffness_inverse, assemble_rhs, assemble_stiffness,
                     solve_coefficients, solve_coefficients_kkt)
from .metrics import ErrorReport, condition_number, fit_rate, relative_h1_error
from .model import ProblemSpec, ShallowModel, SolverConfig, energy, evaluate, evaluate_derivative
from .problems import make_problem
from .report import RunReport

__version__ = "0.1.0"

__all__ = [
    "DbnState", "ErrorReport", "FemSolution", "IndicatorSet", "NeuronClassification",
    "ProblemSpec", "RitzError", "RunReport", "ShallowModel", "SolverConfig", "StiffnessData",
    "adbn_solve", "afem_solve", "apply_stiffness_inverse", "assemble_rhs", "assemble_stiffness",
    "bfgs_solve", "classify", "compute_g", "condition_number", "dbn_solve", "energy",
    "evaluate", "evaluate_derivative", "fem_solve", "fit_rate", "gradient_b", "line_search",
    "local_indicators", "make_problem", "mark", "newton_direction", "recover_flux",
    "redistribute", "relative_h1_error", "solve_coefficients", "solve_coefficients_kkt",
]
