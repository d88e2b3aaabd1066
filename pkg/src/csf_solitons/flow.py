"""Closed-form self-similar motions and numeric verification of the flow law.

A soliton curve evolves as X_hat(u, t) = g(t) * exp(i*f(t)) * X(u) + H(t)
with f(t) = A/(2B) * log(2Bt+1) (A*t when B = 0), g(t) = sqrt(2Bt+1) and a
translation term only in the degenerate (A, B) = (0, 0) case, whose only
non-trivial solution is the Grim Reaper curve.  ``csf_residual`` checks the
defining law <dX_hat/dt, N> = k by central finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import LoopReport, PlaneCurve
from .phase import Params

__all__ = [
    "Motion",
    "motion_for",
    "evolve",
    "csf_residual",
    "grim_reaper",
    "loop_area_rate",
]


@dataclass(frozen=True)
class Motion:
    """Rotation/scaling/translation functions of one self-similar motion.

    ``f(0) = 0``, ``g(0) = 1``, ``H(0) = 0``.  For B < 0 the motion ends at
    ``t_max = -1/(2B)`` where g vanishes; for B >= 0 it is defined for all
    t >= 0.  ``center`` is the screw-dilation center -C/(B+iA) when a drift
    C was folded into a recentering; it is reported as metadata and never
    silently applied to curves.
    """

    params: Params
    velocity: Optional[complex] = None     # translator velocity (A = B = 0)
    center: Optional[complex] = None

    def f(self, t: float) -> float:
        A, B = self.params.A, self.params.B
        if B != 0.0:
            return A / (2.0 * B) * math.log(2.0 * B * t + 1.0)
        return A * t

    def g(self, t: float) -> float:
        B = self.params.B
        return math.sqrt(2.0 * B * t + 1.0)

    def H(self, t: float) -> complex:
        if self.velocity is not None:
            return self.velocity * t
        return 0.0 + 0.0j

    @property
    def t_max(self) -> Optional[float]:
        B = self.params.B
        return -1.0 / (2.0 * B) if B < 0 else None

    @property
    def t_scale(self) -> float:
        A, B = self.params.A, self.params.B
        if B != 0.0:
            return 1.0 / (2.0 * abs(B))
        if A != 0.0:
            return 1.0 / abs(A)
        assert self.velocity is not None
        return 1.0 / abs(self.velocity) ** 2

    def _check_time(self, t: float) -> None:
        tm = self.t_max
        if tm is not None and t >= tm:
            raise ValueError(f"t={t} is beyond the singular time t_max={tm}")
        if self.params.B > 0 and 2.0 * self.params.B * t + 1.0 <= 0.0:
            raise ValueError(f"t={t} precedes the motion's initial singularity")


def motion_for(params: Params, C: Optional[complex] = None) -> Motion:
    """Self-similar motion generated by ``params``.

    For (A, B) = (0, 0) a drift velocity ``C`` is required and the motion
    is the pure translation H(t) = C*t.  Otherwise f and g implement the
    screw-dilation about the origin; a supplied ``C`` is reported as the
    recentering ``-C/(B+iA)`` in ``center`` (the curve screw-dilates about
    that point) without modifying the motion.
    """
    if params.is_null:
        if C is None:
            raise ValueError("the translator case (A, B) = (0, 0) requires "
                             "a drift velocity C")
        return Motion(params=params, velocity=complex(C))
    center = None
    if C is not None and complex(C) != 0:
        center = -complex(C) / complex(params.B, params.A)
    return Motion(params=params, center=center)


def evolve(curve: PlaneCurve, motion: Motion, t: float) -> PlaneCurve:
    """The curve at time ``t`` of the motion: g*exp(i*f)*X + H.

    Curvature samples are rescaled analytically to k/g (never re-differenced)
    and the arc-length parameter to g*s, so the result is again a unit-speed
    curve; its soliton parameters scale to (A, B)/g^2.
    """
    motion._check_time(t)
    g = motion.g(t)
    f = motion.f(t)
    rot = complex(math.cos(f), math.sin(f))
    points = g * rot * curve.points + motion.H(t)
    params = curve.params
    if not params.is_null:
        params = Params(params.A / (g * g), params.B / (g * g))
    return PlaneCurve(params=params, s=g * curve.s, points=points,
                      theta=curve.theta + f, curvature=curve.curvature / g)


def csf_residual(curve: PlaneCurve, motion: Motion, t: float,
                 dt: Optional[float] = None) -> float:
    """max over samples of |<dX_hat/dt, N> - k| at time ``t``.

    The time derivative is a central difference with step ``dt`` (default
    1e-4 of the motion's time scale); the normal N = i*T and the curvature
    of the evolved curve are analytic.  For a soliton curve the residual is
    pure finite-difference truncation, falling off at second order in dt.
    A ``dt`` below 1e-7 of the time scale is rejected: float cancellation
    in the difference quotient would dominate.
    """
    if dt is None:
        dt = 1e-4 * motion.t_scale
    if dt < 1e-7 * motion.t_scale:
        raise ValueError(f"dt={dt} below the cancellation guard "
                         f"{1e-7 * motion.t_scale}")
    motion._check_time(t + dt)
    motion._check_time(t)
    plus = evolve(curve, motion, t + dt)
    minus = evolve(curve, motion, t - dt)
    at_t = evolve(curve, motion, t)
    velocity = (plus.points - minus.points) / (2.0 * dt)
    normals = 1j * np.exp(1j * at_t.theta)
    normal_speed = (velocity * np.conj(normals)).real
    return float(np.max(np.abs(normal_speed - at_t.curvature)))


def grim_reaper(scale: float = 1.0, n_samples: int = 801,
                half_width: float = 1.45) -> PlaneCurve:
    """The translating soliton: the graph of x -> -log(cos x), rescaled.

    Sampled by arc length strictly inside the asymptotes |x| < pi/2 (after
    scaling); ``half_width`` is the un-scaled window half-width in x.  The
    curve satisfies <C, N> = k with C = (0, 1/scale) at every sample: the
    tangent angle is the Gudermannian arcsin(tanh(s/scale)) and the
    curvature cos(theta)/scale.
    """
    if not 0.0 < half_width < math.pi / 2.0:
        raise ValueError(f"sampling window must stay strictly inside the "
                         f"asymptotes: need 0 < half_width < pi/2, got {half_width}")
    if scale <= 0.0:
        raise ValueError("scale must be positive")
    s_max = scale * math.atanh(math.sin(half_width))
    s = np.linspace(-s_max, s_max, n_samples)
    u = np.arcsin(np.tanh(s / scale))
    points = scale * u + 1j * (-scale * np.log(np.cos(u)))
    return PlaneCurve(params=Params(0.0, 0.0), s=s, points=points,
                      theta=u, curvature=np.cos(u) / scale)


def loop_area_rate(loop: LoopReport, params: Params) -> float:
    """Exact area-decrease rate -(pi + alpha) of a resolved loop.

    Cross-checked against the loop's numerical curvature integral (taken
    with the enclosed region on the left); an unresolved loop or an
    inconsistent measurement raises.  For B < 0 the enclosed area equals
    predicted_area = -(pi+alpha)/(2B) because the loop vanishes exactly at
    the singular time.
    """
    if not loop.resolved or loop.interior_angle is None:
        raise ValueError("loop is unresolved; no certified interior angle")
    if params.B >= 0.0:
        raise ValueError("loops shrink only for B < 0; expanding curves "
                         "have no double points")
    alpha = loop.interior_angle
    if loop.theta_gain is not None:
        oriented_gain = loop.theta_gain if loop.ccw else -loop.theta_gain
        if abs(oriented_gain - (math.pi + alpha)) > 1e-3:
            raise ValueError(
                f"curvature integral {oriented_gain} disagrees with "
                f"pi + alpha = {math.pi + alpha}; loop not consistently oriented")
    return -(math.pi + alpha)
