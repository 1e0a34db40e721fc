"""Curves, lengths and geodesics in the first Heisenberg group."""

from .geodesic_solver import (
    HorizontalControlCurve,
    SolverConfig,
    SolveReport,
    initial_feasible_curve,
    refine_and_compare,
    solve_cc_geodesic,
    solve_koranyi_polyline,
)
from .heisenberg import (
    NotHorizontalError,
    cc_length,
    difference_quotient,
    dilate,
    escape_radius,
    euclidean_comparison_bound,
    example_geodesic,
    group_inverse,
    group_multiply,
    horizontal_frame,
    horizontal_lift,
    horizontality_residual,
    koranyi_distance,
    koranyi_norm,
)
from .metric_core import (
    DomainError,
    LengthReport,
    Partition,
    SampledCurve,
    arclength_reparametrize,
    curve_length,
    euclidean_distance,
    length_profile,
    linear_reparametrize,
    polygonal_length,
)

__version__ = "0.1.0"
