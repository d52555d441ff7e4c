"""Solvers and diagnostics for Caputo fractional initial value problems.

The package builds piecewise-polynomial discretizations of the Caputo
derivative of order 0 < alpha < 1 (degrees 1..3 with all admissible
evaluation offsets), steps implicit one-leg methods built on them, and
exposes the stability and truncation diagnostics used to validate them.
"""

from .expr import ExprError, ExprEvalError, ExprSyntaxError, evaluate, parse, to_source
from .harness import (
    ConfigError,
    ConvergenceRow,
    RunConfig,
    TruncationSample,
    fit_order,
    linear_complex,
    load_config,
    mlf_decay,
    nonlinear_square,
    parse_config,
    run_convergence,
    run_truncation_study,
)
from .kernel import KernelTable, backward_diff, dbinom_poly, kernel_integral, kernel_table
from .operator import GridSpec, Trajectory, apply_discrete_caputo
from .oracle import (
    PiecewiseInterpolant,
    build_interpolant,
    caputo_monomial,
    oracle_discrete_caputo,
    piece_layout,
)
from .solver import (
    NewtonConfig,
    NewtonDivergedError,
    PivotBreakdownError,
    ProblemSpec,
    SolveReport,
    bootstrap_starts,
    solve,
)
from .special import MittagLefflerError, binom_series, gamma_real, mittag_leffler
from .stability import (
    LocusCurve,
    RegionVerdict,
    SeriesDiagnostics,
    boundary_locus,
    in_stability_region,
    phi_at,
    series_diagnostics,
)
from .weights import (
    ALL_SCHEMES,
    SchemeId,
    WeightConsistencyError,
    WeightTable,
    convolution_weights,
    starting_weights,
    weight_table,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # special functions
    "MittagLefflerError", "mittag_leffler", "gamma_real", "binom_series",
    # kernel integrals
    "KernelTable", "kernel_table", "kernel_integral", "dbinom_poly", "backward_diff",
    # weights
    "SchemeId", "ALL_SCHEMES", "WeightTable", "WeightConsistencyError",
    "weight_table", "convolution_weights", "starting_weights",
    # operator
    "GridSpec", "Trajectory", "apply_discrete_caputo",
    # reference evaluation
    "PiecewiseInterpolant", "build_interpolant", "piece_layout",
    "oracle_discrete_caputo", "caputo_monomial",
    # time stepping
    "ProblemSpec", "NewtonConfig", "SolveReport", "solve", "bootstrap_starts",
    "NewtonDivergedError", "PivotBreakdownError",
    # stability
    "LocusCurve", "RegionVerdict", "SeriesDiagnostics",
    "boundary_locus", "in_stability_region", "series_diagnostics", "phi_at",
    # expressions
    "parse", "evaluate", "to_source", "ExprError", "ExprSyntaxError", "ExprEvalError",
    # harness
    "mlf_decay", "linear_complex", "nonlinear_square",
    "ConvergenceRow", "run_convergence", "TruncationSample", "run_truncation_study",
    "fit_order", "RunConfig", "parse_config", "load_config", "ConfigError",
]
