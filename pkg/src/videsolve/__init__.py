"""Numerical toolkit for scalar Volterra integro-differential equations:
a trapezium-rule stepper with fixed-point refinement of the implicit
terms, linear stability and bifurcation analysis of the scheme, built-in
benchmark problems with error tables, and a CSV command-line front end.
"""

from .expr import (
    BinOp,
    Call,
    EvalError,
    Expression,
    Neg,
    Num,
    ParseError,
    Var,
    evaluate,
    free_variables,
    parse,
    unparse,
)
from .core import (
    SolverConfig,
    SolverError,
    StepIntermediates,
    Trajectory,
    VideProblem,
    corrector,
    djm_refine,
    djm_step,
    implicit_terms,
    lag_sums,
    predictor,
    problem_from_text,
    solve,
)
from .analysis import (
    BifurcationReport,
    BifurcationThresholds,
    StabilityAssessment,
    assess_stability,
    bifurcation_coefficients,
    bifurcation_thresholds,
    classify_bifurcation,
    quadratic_roots,
    simulate_difference,
    stability_coefficients,
    stability_region,
)
from .bench import (
    ErrorRow,
    ErrorTable,
    OrderEstimate,
    builtin_problems,
    depth_comparison,
    error_table,
    estimate_order,
    get_example,
    max_abs_error,
)

__version__ = "0.1.0"

__all__ = [
    "BifurcationReport",
    "BifurcationThresholds",
    "BinOp",
    "Call",
    "ErrorRow",
    "ErrorTable",
    "EvalError",
    "Expression",
    "Neg",
    "Num",
    "OrderEstimate",
    "ParseError",
    "SolverConfig",
    "SolverError",
    "StabilityAssessment",
    "StepIntermediates",
    "Trajectory",
    "Var",
    "VideProblem",
    "assess_stability",
    "bifurcation_coefficients",
    "bifurcation_thresholds",
    "builtin_problems",
    "classify_bifurcation",
    "corrector",
    "depth_comparison",
    "djm_refine",
    "djm_step",
    "error_table",
    "estimate_order",
    "evaluate",
    "free_variables",
    "get_example",
    "implicit_terms",
    "lag_sums",
    "max_abs_error",
    "parse",
    "predictor",
    "problem_from_text",
    "quadratic_roots",
    "simulate_difference",
    "solve",
    "stability_coefficients",
    "stability_region",
    "unparse",
]
