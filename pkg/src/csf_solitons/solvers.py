"""High-level solution finders and the soliton taxonomy classifier.

Closed shrinking curves are found by root-finding on the tangent-angle gain
per excursion; the comet spiral by bisection on a section through the
shrinking-rotating sink; arbitrary ``(A, B, x0, y0)`` are classified into
the soliton families.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .phase import (
    Params,
    PhaseState,
    Trajectory,
    EventHit,
    EventSpec,
    Y_ZERO,
    X_ZERO,
    X_EQUALS_BETA,
    Y_BELOW,
    integrate,
    fixed_points,
    normalize_params,
    x_equals_event,
    x_zero_event,
    y_below_event,
    y_zero_event,
)

__all__ = [
    "SolitonClass",
    "Classification",
    "ShootingResult",
    "delta_theta",
    "find_abresch_langer",
    "find_comet_spiral",
    "classify",
    "admissible_rotation_ratio",
]

SQRT2_PI = math.sqrt(2.0) * math.pi


class SolitonClass(str, enum.Enum):
    """Taxonomy of self-similar curve shortening flow solutions."""

    LINE = "Line"
    GRIM_REAPER = "GrimReaper"
    CIRCLE = "Circle"
    EXPANDER = "Expander"
    ABRESCH_LANGER = "AbreschLanger"
    DENSE_SHRINKER = "DenseShrinker"
    ROTATOR = "Rotator"
    ROTATING_EXPANDER = "RotatingExpander"
    ROTATING_SHRINKER_TYPE1 = "RotatingShrinkerType1"
    COMET_SPIRAL = "CometSpiral"
    UNDETERMINED = "Undetermined"


@dataclass
class Classification:
    soliton_class: SolitonClass
    p: Optional[int] = None
    q: Optional[int] = None
    limit_radius: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)


@dataclass
class ShootingResult:
    """Outcome of a one-parameter shooting solve."""

    parameter: float
    bracket: tuple[float, float]
    residual: float
    trajectory: Trajectory
    details: dict = field(default_factory=dict)


def admissible_rotation_ratio(p: int, q: int) -> bool:
    """Whether (p, q) gives a closed shrinking curve: coprime, 1/2 < p/q < sqrt(2)/2.

    Both bounds are checked exactly in integers (q < 2p and 2p^2 < q^2).
    """
    if p < 1 or q < 1 or math.gcd(p, q) != 1:
        return False
    return q < 2 * p and 2 * p * p < q * q


def _shrinker_period(r_max: float, tol: float, n_periods: int = 1
                     ) -> tuple[float, float, Trajectory]:
    """Integrate the normalized shrinking orbit starting at (r_max, 0).

    Runs for ``n_periods`` full periods (two y = 0 crossings each) and
    returns (delta_theta over one period, one period length, trajectory).
    """
    tr = integrate(Params(0.0, -1.0), PhaseState(r_max, 0.0),
                   (0.0, 1e6), tol=tol,
                   events=[y_zero_event(terminal=2 * n_periods)])
    if tr.forward_stop is None or tr.forward_stop.kind != Y_ZERO:
        raise RuntimeError(f"orbit from r_max={r_max} did not close: "
                           f"stopped by {tr.forward_stop}")
    hits = tr.events_of_kind(Y_ZERO)
    period = hits[1].s
    return hits[1].theta, period, tr


def delta_theta(r_max: float, tol: float = 1e-10) -> float:
    """Tangent-angle gain over one excursion of the shrinking orbit.

    Normalized case A = 0, B = -1: start at (x, y) = (r_max, 0), the outer
    touch of the annulus, and integrate one full period (back to the outer
    touch).  The returned value equals the integral of the curvature over
    the period; it decreases continuously from sqrt(2)*pi (r_max -> 1+)
    to pi (r_max -> infinity).
    """
    if not r_max > 1.0:
        raise ValueError(f"r_max must exceed 1 (the circle), got {r_max}")
    if r_max > 30.0:
        # x_min = r_max*exp(-r_max^2/2) underflows to zero in double
        # precision near r_max ~ 38 and the orbit degenerates to a line.
        raise ValueError(f"r_max={r_max} too large: the inner curvature "
                         "underflows double precision")
    value, _, _ = _shrinker_period(r_max, tol)
    return value


def find_abresch_langer(p: int, q: int, tol: float = 1e-9,
                        integrator_tol: float = 1e-11) -> ShootingResult:
    """Solve for the closed shrinking curve with rotation number p.

    The curve touches each boundary of its annulus q times; it exists for
    coprime (p, q) with 1/2 < p/q < sqrt(2)/2 and is found by bracketed
    bisection of delta_theta(r_max) = 2*pi*p/q followed by secant polish.
    The returned trajectory covers the q excursions of the closed curve;
    ``details['closure_residual']`` reports |X(q*period) - X(0)|.
    """
    if not admissible_rotation_ratio(p, q):
        raise ValueError(
            f"(p, q) = ({p}, {q}) is not admissible: closed shrinking curves "
            "require coprime integers with 1/2 < p/q < sqrt(2)/2")
    target = 2.0 * math.pi * p / q

    evaluations: dict[float, float] = {}

    def f(r: float) -> float:
        if r not in evaluations:
            evaluations[r] = delta_theta(r, tol=integrator_tol) - target
        return evaluations[r]

    lo = 1.0 + 1e-6
    if f(lo) <= 0.0:
        raise RuntimeError(f"target {target} not below delta_theta({lo})")
    hi = 2.0
    while f(hi) > 0.0:
        hi *= 1.6
        if hi > 30.0:
            raise RuntimeError(f"could not bracket delta_theta = {target}")
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    r_a, r_b = lo, hi
    for _ in range(3):
        fa, fb = f(r_a), f(r_b)
        if fb == fa:
            break
        r_c = r_b - fb * (r_b - r_a) / (fb - fa)
        if not lo - 1e-9 <= r_c <= hi + 1e-9:
            break
        r_a, r_b = r_b, r_c
    r_star = min(evaluations, key=lambda r: abs(evaluations[r]))
    residual = abs(evaluations[r_star])
    if residual > tol:
        raise RuntimeError(f"delta_theta residual {residual} exceeds {tol} "
                           f"for (p, q) = ({p}, {q})")

    _, period, orbit = _shrinker_period(r_star, integrator_tol, n_periods=q)
    w0 = complex(orbit.x[0], orbit.y[0]) / complex(0.0, 1.0)
    w1 = (complex(orbit.x[-1], orbit.y[-1]) / complex(0.0, 1.0)
          * complex(math.cos(orbit.theta[-1]), math.sin(orbit.theta[-1])))
    closure = abs(w1 - w0)
    return ShootingResult(
        parameter=r_star, bracket=(lo, hi), residual=residual,
        trajectory=orbit,
        details={
            "p": p, "q": q, "target_delta_theta": target,
            "delta_theta": evaluations[r_star] + target,
            "period": period,
            "closure_residual": closure,
            "r_min": float(np.min(np.abs(orbit.x))),
        })


# Backward-shot outcomes for the comet section.
_LEFT = "left"      # left the strip through x = 0: rotating-shrinker side
_RIGHT = "right"    # left the strip through x = beta
_DEEP = "deep"      # reached y < -y_max inside the strip: on the comet
_NONE = "none"


def _comet_shot(beta: float, y0: float, y_max: float, tol: float,
                span: float) -> str:
    """Classify the backward trajectory from the section point (beta, y0)."""
    sink_y = -1.0 / beta
    if y0 <= sink_y:
        return _RIGHT  # x'(0) points out of the strip going backward
    tr = integrate(Params(1.0, -beta * beta), PhaseState(beta, y0),
                   (-span, 0.0), tol=tol,
                   events=[x_zero_event(terminal=1),
                           x_equals_event(beta, direction=+1, terminal=1),
                           y_below_event(-y_max, terminal=1)])
    stop = tr.backward_stop
    if stop is None:
        return _NONE
    return {X_ZERO: _LEFT, X_EQUALS_BETA: _RIGHT, Y_BELOW: _DEEP}[stop.kind]


def _rescale_trajectory(tr: Trajectory, params: Params, k: float,
                        reflected: bool) -> Trajectory:
    """Map a trajectory of the normalized system back to ``params``.

    The normalized system is k^2 * (A, B) with states scaled by k and arc
    length by 1/k; reflection (used when A < 0) maps x -> -x, theta -> -theta.
    """
    sx = -1.0 if reflected else 1.0
    return Trajectory(
        params=params,
        s=tr.s * k, x=sx * tr.x / k, y=tr.y / k,
        theta=sx * tr.theta,
        dx=sx * tr.dx / (k * k), dy=tr.dy / (k * k),
        events=[EventHit(e.kind, e.s * k,
                         PhaseState(sx * e.state.x / k, e.state.y / k),
                         sx * e.theta) for e in tr.events],
        forward_stop=tr.forward_stop, backward_stop=tr.backward_stop,
    )


def find_comet_spiral(params: Params, tol: float = 1e-10,
                      y_max: float = 50.0) -> ShootingResult:
    """Shoot for the rotating-shrinking soliton whose outer end spirals to infinity.

    Works in the normal form A = 1, B = -beta^2 (reflect if A < 0, rescale
    otherwise) and bisects the section x = beta on the initial height y0:
    going backward, shots on one side leave the strip 0 < x < beta through
    x = 0 (the ordinary two-sided shrinkers) and shots on the other side
    leave through x = beta; the separating trajectory dives down the strip
    with x -> 0, y -> -infinity.  Because backward deviations from that
    trajectory grow like exp(integral |y|), no off-comet shot can track it
    to large depth, so the returned trajectory is produced by integrating
    *forward* from the quasi-static tail x ~ -1/y at depth y_max + 10 (the
    numerically contracting direction) and is cross-checked against the
    bisected section height.
    """
    if params.A == 0.0 or params.B >= 0.0:
        raise ValueError("comet spirals exist only for A != 0 and B < 0; "
                         f"got (A, B) = ({params.A}, {params.B})")
    norm, k, reflected = normalize_params(params)
    beta = math.sqrt(-norm.B)
    sink = PhaseState(beta, -1.0 / beta)
    shot_tol = min(1e-10, tol)
    span = 60.0 / (beta * beta) + 200.0

    # Bracket scan from above the sink height downward; the first class
    # flip brackets the separating height.  Additional flips (possible for
    # spiral sinks, where the comet crosses the section repeatedly) are
    # reported in the diagnostics instead of being silently assumed away.
    y_hi = sink.y + 3.5 * max(1.0, beta)
    grid = np.linspace(y_hi, sink.y - 0.5, 41)
    outcomes = [_comet_shot(beta, float(y0), y_max, shot_tol, span)
                for y0 in grid]
    flips = [i for i in range(len(grid) - 1)
             if {outcomes[i], outcomes[i + 1]} == {_LEFT, _RIGHT}]
    deep_hits = [float(grid[i]) for i, o in enumerate(outcomes) if o == _DEEP]
    if not flips and not deep_hits:
        raise RuntimeError("no behavior change found on the shooting section; "
                           f"outcomes: {outcomes}")

    if flips:
        i = flips[0]
        y_a, y_b = float(grid[i]), float(grid[i + 1])
        out_a = outcomes[i]
        while abs(y_a - y_b) > tol:
            y_m = 0.5 * (y_a + y_b)
            out_m = _comet_shot(beta, y_m, y_max, shot_tol, span)
            if out_m == _DEEP:
                deep_hits.append(y_m)
                break
            if out_m == out_a:
                y_a = y_m
            else:
                y_b = y_m
        y0_star = 0.5 * (y_a + y_b)
        bracket_n = (min(y_a, y_b), max(y_a, y_b))
    else:
        y0_star = deep_hits[0]
        bracket_n = (y0_star, y0_star)
    width = bracket_n[1] - bracket_n[0]

    # Stability of the classification under a 10x tighter integrator tol.
    consistent = True
    if flips and width > 0:
        for y_end, out_end in ((y_a, out_a),
                               (y_b, _LEFT if out_a == _RIGHT else _RIGHT)):
            if _comet_shot(beta, y_end, y_max, shot_tol / 10.0, span) != out_end:
                consistent = False

    # The comet itself, integrated in the contracting direction.
    y_deep = -(y_max + 10.0)
    rate = min(abs(e.real) for e in
               fixed_points(norm)[0].eigenvalues)
    tail_span = (abs(y_deep) - 1.0 / beta) / (beta * beta) + math.log(1e12) / rate
    sink_ev = lambda s, x, y, th: math.hypot(x - sink.x, y - sink.y) - 1e-9
    comet = integrate(norm, PhaseState(-1.0 / y_deep, y_deep),
                      (0.0, tail_span), tol=1e-12,
                      events=[x_equals_event(beta),
                              EventSpec("sink-converged", sink_ev, -1, 1)])
    crossings = [e.state.y for e in comet.events_of_kind(X_EQUALS_BETA)]
    if crossings:
        section_gap = min(abs(c - y0_star) for c in crossings)
    else:
        # Node-type sink: the comet approaches x = beta only in the limit,
        # and the bisection height degenerates to the sink height.
        section_gap = abs(y0_star - sink.y)
    sink_distance = math.hypot(comet.x[-1] - sink.x, comet.y[-1] - sink.y)

    out_traj = _rescale_trajectory(comet, params, k, reflected)
    return ShootingResult(
        parameter=y0_star / k,
        bracket=(bracket_n[0] / k, bracket_n[1] / k),
        residual=width / k,
        trajectory=out_traj,
        details={
            "beta_normalized": beta,
            "scale": k,
            "reflected": reflected,
            "sink": (sink.x / k * (-1.0 if reflected else 1.0), sink.y / k),
            "section_crossings": [c / k for c in crossings],
            "section_consistency": section_gap / k,
            "sink_distance": sink_distance / k,
            "scan_flips": len(flips),
            "deep_hits": deep_hits,
            "classification_stable_at_tighter_tol": consistent,
            "y_max": y_max,
        })


def _rational_match(value: float, tol: float, q_max: int = 200
                    ) -> Optional[tuple[int, int]]:
    """Best rational p/q (q <= q_max) for ``value`` if within tol*q of it."""
    frac = Fraction(value).limit_denominator(q_max)
    p, q = frac.numerator, frac.denominator
    if q <= q_max and abs(value - p / q) <= tol * q:
        return p, q
    return None


def classify(params: Params, init: PhaseState, horizon: float = 400.0,
             tol: float = 1e-9) -> Classification:
    """Name the soliton family generated by ``(params, init)``.

    The decision tree follows the parameter quadrants: degenerate (0, 0)
    gives the straight line (the Grim Reaper arises only from the
    translator construction, not from the phase plane); A = 0 splits into
    expanders, the circle, closed shrinking curves (rational tangent gain
    per excursion, recognized by continued fractions with denominator at
    most 200) and annulus-dense shrinkers; A != 0 splits into rotators,
    rotating expanders, and for B < 0 the two-sided circle-wrapping
    shrinkers versus the comet spiral, told apart by whether the backward
    trajectory leaves the strip 0 < x < beta through x = 0.  When a label
    cannot be established within ``horizon``, an explicit undetermined
    result carrying diagnostics is returned instead of a guess.
    """
    A, B = params.A, params.B
    x0, y0 = init
    if A == 0.0 and B == 0.0:
        return Classification(SolitonClass.LINE)
    limit_radius = 1.0 / math.sqrt(-B) if B < 0 else None

    if A == 0.0 and B > 0.0:
        if x0 == 0.0:
            return Classification(SolitonClass.LINE)
        return Classification(SolitonClass.EXPANDER)

    if A == 0.0 and B < 0.0:
        if x0 == 0.0:
            return Classification(SolitonClass.LINE, limit_radius=limit_radius)
        beta = math.sqrt(-B)
        if math.hypot(abs(x0) - beta, y0) <= 1e-9 * beta:
            return Classification(SolitonClass.CIRCLE, limit_radius=limit_radius)
        norm, k, _ = normalize_params(params)
        state = PhaseState(abs(x0) * k, y0 * k if x0 > 0 else -y0 * k)
        tr = integrate(norm, state, (0.0, horizon / k if k > 0 else horizon),
                       tol=min(tol, 1e-10), events=[y_zero_event(terminal=3)])
        hits = tr.events_of_kind(Y_ZERO)
        if len(hits) < 3:
            return Classification(SolitonClass.UNDETERMINED,
                                  limit_radius=limit_radius,
                                  diagnostics={"reason": "no full period within "
                                               "horizon", "crossings": len(hits)})
        dth = hits[2].theta - hits[0].theta
        match = _rational_match(dth / (2.0 * math.pi), tol)
        if match is not None and admissible_rotation_ratio(*match):
            return Classification(SolitonClass.ABRESCH_LANGER, p=match[0],
                                  q=match[1], limit_radius=limit_radius,
                                  diagnostics={"delta_theta": dth})
        return Classification(SolitonClass.DENSE_SHRINKER,
                              limit_radius=limit_radius,
                              diagnostics={"delta_theta": dth})

    if B >= 0.0:  # A != 0
        tag = SolitonClass.ROTATOR if B == 0.0 else SolitonClass.ROTATING_EXPANDER
        return Classification(tag)

    # A != 0, B < 0.
    norm, k, reflected = normalize_params(params)
    beta = math.sqrt(-norm.B)
    xn = (-x0 if reflected else x0) * k
    yn = y0 * k
    if math.hypot(xn - beta, yn + 1.0 / beta) <= 1e-9 * beta or \
            math.hypot(xn + beta, yn - 1.0 / beta) <= 1e-9 * beta:
        return Classification(SolitonClass.CIRCLE, limit_radius=limit_radius)
    if xn < 0.0:
        # The reversed parametrization -(x(-s), y(-s)) solves the same
        # system, so a left-half start is classified through its mirror.
        xn, yn = -xn, -yn
    if xn == 0.0:
        return Classification(SolitonClass.ROTATING_SHRINKER_TYPE1,
                              limit_radius=limit_radius)
    # A start deep inside the strip hugging the quasi-static tail x ~ -1/y
    # is indistinguishable from the comet in double precision: backward
    # deviations grow like exp(integral |y|), so no finite-precision point
    # could be tracked down the tail if it were not on it.
    if 0.0 < xn < beta and yn < -3.0 * max(1.0, 1.0 / beta) \
            and abs(xn * yn + 1.0) < 0.25:
        return Classification(SolitonClass.COMET_SPIRAL,
                              limit_radius=limit_radius,
                              diagnostics={"on_tail_within_resolution": True,
                                           "depth": float(yn)})
    y_max = 50.0
    tr = integrate(norm, PhaseState(xn, yn), (-horizon / k if k > 0 else -horizon, 0.0),
                   tol=min(tol, 1e-10),
                   events=[x_zero_event(terminal=1),
                           y_below_event(-y_max, terminal=1)])
    stop = tr.backward_stop
    if stop is not None and stop.kind == X_ZERO:
        return Classification(SolitonClass.ROTATING_SHRINKER_TYPE1,
                              limit_radius=limit_radius,
                              diagnostics={"crossing_s": stop.s * k})
    if stop is not None and stop.kind == Y_BELOW:
        return Classification(SolitonClass.COMET_SPIRAL,
                              limit_radius=limit_radius,
                              diagnostics={"depth_s": stop.s * k})
    # Horizon exhausted: still confined to the strip tracking the tail?
    xe, ye = tr.x[0], tr.y[0]
    if 0.0 < xe < beta and ye < -1.0 / beta - 1.0 and abs(xe * ye + 1.0) < 0.2:
        return Classification(SolitonClass.COMET_SPIRAL,
                              limit_radius=limit_radius,
                              diagnostics={"confined_to": float(ye),
                                           "horizon_exhausted": True})
    return Classification(SolitonClass.UNDETERMINED,
                          limit_radius=limit_radius,
                          diagnostics={"reason": "backward behavior not "
                                       "resolved within horizon",
                                       "end_state": (float(xe), float(ye)),
                                       "stop": None if stop is None
                                       else stop.kind})
