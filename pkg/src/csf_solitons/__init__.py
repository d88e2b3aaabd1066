"""Self-similar solutions of the curve shortening flow.

Construction, classification and evolution of every planar soliton of the
flow: closed shrinking curves, cone expanders, rotating spirals and comet
spirals, all generated from the phase-plane system x' = x*y + A,
y' = -x**2 - B and reconstructed as arc-length-parametrized plane curves.
"""

from .phase import (
    Params,
    PhaseState,
    Trajectory,
    EventSpec,
    FixedPoint,
    rhs,
    integrate,
    first_integral,
    fixed_points,
)
from .geometry import (
    PlaneCurve,
    PolarTrace,
    LoopReport,
    TotalCurvature,
    reconstruct,
    polar,
    total_curvature,
    self_intersections,
    excursions,
    asymptotic_direction,
)
from .solvers import (
    SolitonClass,
    Classification,
    ShootingResult,
    delta_theta,
    find_abresch_langer,
    find_comet_spiral,
    classify,
)
from .flow import (
    Motion,
    motion_for,
    evolve,
    csf_residual,
    grim_reaper,
    loop_area_rate,
)

__version__ = "0.1.0"

__all__ = [
    "Params", "PhaseState", "Trajectory", "EventSpec", "FixedPoint",
    "rhs", "integrate", "first_integral", "fixed_points",
    "PlaneCurve", "PolarTrace", "LoopReport", "TotalCurvature",
    "reconstruct", "polar", "total_curvature", "self_intersections",
    "excursions", "asymptotic_direction",
    "SolitonClass", "Classification", "ShootingResult",
    "delta_theta", "find_abresch_langer", "find_comet_spiral", "classify",
    "Motion", "motion_for", "evolve", "csf_residual", "grim_reaper",
    "loop_area_rate",
    "__version__",
]
