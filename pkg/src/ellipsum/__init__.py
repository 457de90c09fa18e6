"""Tight outer ellipsoids for Minkowski sums of ellipsoids.

The public surface: the ``Ellipsoid`` value type and its quadratic-form
twin, the one-parameter outer family and its volume-optimal member
(``mvoe_pair`` / ``mvoe_sum``), discrete-time reach-tube propagation built
on the pairwise step, and brute-force verification oracles.
"""

from .ellipsoid import (
    Ellipsoid,
    QuadraticForm,
    affine_image,
    from_quadratic_form,
    lift_degenerate,
    unit_ball_volume,
    unit_direction,
)
from .errors import (
    DimensionMismatch,
    DimensionNotTwo,
    EllipsumError,
    EmptyInput,
    InvalidWeights,
    MaxIterationsExceeded,
    NoConvergence,
    NonPositiveBeta,
    NotPositiveDefinite,
    SingularMap,
    UnsupportedDimension,
)
from .mvoe import (
    MvoeResult,
    OptimalityPolynomial,
    SolverOptions,
    beta_trace_optimal,
    bracket_beta_2d,
    fixed_point_map,
    generalized_spectrum,
    logdet_curvature,
    mvoe_pair,
    mvoe_sum,
    optimality_polynomial,
    optimality_residual,
    q_of_alpha,
    q_of_beta,
    q_of_direction,
    solve_beta_bisection,
    solve_beta_fixed_point,
    transform_direction_to_beta,
)
from .oracles import (
    CheckReport,
    consistency_checks,
    containment_check,
    golden_section_beta,
    stationarity_check,
)
from .reach import LtiStage, ReachTube, propagate_backward, propagate_forward, step_backward, step_forward

__version__ = "0.1.0"

__all__ = [
    "CheckReport",
    "DimensionMismatch",
    "DimensionNotTwo",
    "Ellipsoid",
    "EllipsumError",
    "EmptyInput",
    "InvalidWeights",
    "LtiStage",
    "MaxIterationsExceeded",
    "MvoeResult",
    "NoConvergence",
    "NonPositiveBeta",
    "NotPositiveDefinite",
    "OptimalityPolynomial",
    "QuadraticForm",
    "ReachTube",
    "SingularMap",
    "SolverOptions",
    "UnsupportedDimension",
    "affine_image",
    "beta_trace_optimal",
    "bracket_beta_2d",
    "consistency_checks",
    "containment_check",
    "fixed_point_map",
    "from_quadratic_form",
    "generalized_spectrum",
    "golden_section_beta",
    "lift_degenerate",
    "logdet_curvature",
    "mvoe_pair",
    "mvoe_sum",
    "optimality_polynomial",
    "optimality_residual",
    "propagate_backward",
    "propagate_forward",
    "q_of_alpha",
    "q_of_beta",
    "q_of_direction",
    "solve_beta_bisection",
    "solve_beta_fixed_point",
    "stationarity_check",
    "step_backward",
    "step_forward",
    "transform_direction_to_beta",
    "unit_ball_volume",
    "unit_direction",
]
