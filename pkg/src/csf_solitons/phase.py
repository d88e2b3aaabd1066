"""Phase-plane system generating self-similar curve shortening flow solitons.

The two-parameter ODE system

    x' = x*y + A
    y' = -x**2 - B

is integrated in arc length ``s`` together with the tangent angle
``theta' = x`` (``x`` is the signed curvature of the reconstructed curve).
The pair ``(A, B)`` selects the motion type: rotation rate ``A`` and
dilation rate ``B`` at time zero.  Every soliton curve with
``(A, B) != (0, 0)`` arises from a trajectory of this system.

The integrator is an embedded Dormand-Prince 5(4) pair with PI step-size
control, cubic Hermite dense output and event location by bisection on the
dense output.  Error is controlled per unit arc length: the local error of
an accepted step of size h is at most ``tol * |h|``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

__all__ = [
    "Params",
    "PhaseState",
    "EventSpec",
    "EventHit",
    "Trajectory",
    "FixedPoint",
    "rhs",
    "integrate",
    "first_integral",
    "fixed_points",
    "y_zero_event",
    "x_zero_event",
    "x_equals_event",
    "y_below_event",
    "phase_norm_event",
    "normalize_params",
]

# Event kinds attached to trajectories.
Y_ZERO = "y-zero-crossing"
X_ZERO = "x-zero-crossing"
X_EQUALS_BETA = "x-equals-beta"
NORM_EXCEEDED = "norm-exceeds-threshold"
Y_BELOW = "y-below-threshold"
NORM_REACHES = "norm-reaches"

DEFAULT_TOL = 1e-10
DEFAULT_NORM_THRESHOLD = 1e6
EVENT_S_TOL = 1e-12


@dataclass(frozen=True)
class Params:
    """Rotation rate ``A`` and dilation rate ``B`` (both 1/length^2)."""

    A: float
    B: float

    def __post_init__(self):
        if not (math.isfinite(self.A) and math.isfinite(self.B)):
            raise ValueError(f"params must be finite, got ({self.A}, {self.B})")

    @property
    def beta(self) -> float:
        """sqrt(-B); defined only for B < 0."""
        if self.B >= 0:
            raise ValueError(f"beta requires B < 0, got B={self.B}")
        return math.sqrt(-self.B)

    @property
    def magnitude(self) -> float:
        return math.hypot(self.A, self.B)

    @property
    def is_null(self) -> bool:
        return self.A == 0.0 and self.B == 0.0


class PhaseState(NamedTuple):
    """A point of the phase plane; ``x`` is the signed curvature."""

    x: float
    y: float


def rhs(params: Params, state: PhaseState) -> tuple[float, float]:
    """Right-hand side (x*y + A, -x**2 - B)."""
    x, y = state
    return (x * y + params.A, -x * x - params.B)


@dataclass(frozen=True)
class EventSpec:
    """A scalar event function whose sign changes are located and recorded.

    ``fn(s, x, y, theta)`` is evaluated along the trajectory; a root is
    recorded whenever the sign changes between consecutive dense-output
    checkpoints.  ``direction`` filters crossings: +1 keeps only crossings
    where the function increases along the direction of integration, -1
    only decreasing ones, 0 keeps both.  If ``terminal`` is an integer, the
    integration stops at the ``terminal``-th accepted crossing.
    """

    kind: str
    fn: Callable[[float, float, float, float], float]
    direction: int = 0
    terminal: Optional[int] = None


def y_zero_event(direction: int = 0, terminal: Optional[int] = None) -> EventSpec:
    return EventSpec(Y_ZERO, lambda s, x, y, th: y, direction, terminal)


def x_zero_event(direction: int = 0, terminal: Optional[int] = None) -> EventSpec:
    return EventSpec(X_ZERO, lambda s, x, y, th: x, direction, terminal)


def x_equals_event(value: float, direction: int = 0,
                   terminal: Optional[int] = None) -> EventSpec:
    return EventSpec(X_EQUALS_BETA, lambda s, x, y, th: x - value, direction, terminal)


def y_below_event(threshold: float, terminal: Optional[int] = 1) -> EventSpec:
    return EventSpec(Y_BELOW, lambda s, x, y, th: y - threshold, -1, terminal)


def phase_norm_event(value: float, terminal: Optional[int] = 1) -> EventSpec:
    """Fires when sqrt(x^2 + y^2) reaches ``value`` from below."""
    return EventSpec(NORM_REACHES,
                     lambda s, x, y, th: math.hypot(x, y) - value, 1, terminal)


class EventHit(NamedTuple):
    kind: str
    s: float
    state: PhaseState
    theta: float


@dataclass
class Trajectory:
    """Adaptive-step samples ``(s, x, y, theta)`` of one solution.

    ``s`` is strictly increasing and contains 0 with ``theta(0) = 0``.
    ``dx``/``dy`` hold the exact derivative values at the samples, which
    makes cubic Hermite interpolation between samples cheap; ``theta`` uses
    ``x`` as its derivative.  ``events`` lists located event hits in
    ascending ``s``; canonical kinds are ``y-zero-crossing``,
    ``x-zero-crossing``, ``x-equals-beta`` and ``norm-exceeds-threshold``.
    """

    params: Params
    s: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    dx: np.ndarray
    dy: np.ndarray
    events: list[EventHit] = field(default_factory=list)
    forward_stop: Optional[EventHit] = None
    backward_stop: Optional[EventHit] = None

    def __len__(self) -> int:
        return len(self.s)

    @property
    def samples(self):
        """Iterate ``(s, PhaseState, theta)`` triples."""
        for i in range(len(self.s)):
            yield self.s[i], PhaseState(self.x[i], self.y[i]), self.theta[i]

    def phase_norm(self) -> np.ndarray:
        return np.hypot(self.x, self.y)

    @property
    def final_state(self) -> PhaseState:
        return PhaseState(self.x[-1], self.y[-1])

    @property
    def initial_state(self) -> PhaseState:
        return PhaseState(self.x[0], self.y[0])

    def interpolate(self, s_query) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Cubic Hermite interpolation of (x, y, theta) at arbitrary s."""
        sq = np.atleast_1d(np.asarray(s_query, dtype=float))
        if sq.size and (sq.min() < self.s[0] - 1e-12 or sq.max() > self.s[-1] + 1e-12):
            raise ValueError("interpolation query outside trajectory span")
        j = np.clip(np.searchsorted(self.s, sq, side="right") - 1, 0, len(self.s) - 2)
        h = self.s[j + 1] - self.s[j]
        t = np.clip((sq - self.s[j]) / h, 0.0, 1.0)
        out = []
        for u, du in ((self.x, self.dx), (self.y, self.dy), (self.theta, self.x)):
            h00 = (1.0 + 2.0 * t) * (1.0 - t) ** 2
            h10 = t * (1.0 - t) ** 2
            h01 = t * t * (3.0 - 2.0 * t)
            h11 = t * t * (t - 1.0)
            out.append(h00 * u[j] + h10 * h * du[j] + h01 * u[j + 1] + h11 * h * du[j + 1])
        return out[0], out[1], out[2]

    def events_of_kind(self, kind: str) -> list[EventHit]:
        return [e for e in self.events if e.kind == kind]


# Dormand-Prince 5(4) coefficients.
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = (9017 / 3168, -355 / 33, 46732 / 5247,
                                49 / 176, -5103 / 18656)
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (71 / 57600, -71 / 16695, 71 / 1920,
                                -17253 / 339200, 22 / 525, -1 / 40)


def _hermite(t: float, h: float, u0, f0, u1, f1):
    """Evaluate the cubic Hermite interpolant of one step at fraction t."""
    h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t)
    h10 = t * (1.0 - t) * (1.0 - t)
    h01 = t * t * (3.0 - 2.0 * t)
    h11 = t * t * (t - 1.0)
    return tuple(h00 * a + h10 * h * da + h01 * b + h11 * h * db
                 for a, da, b, db in zip(u0, f0, u1, f1))


class _Branch(NamedTuple):
    s: list
    x: list
    y: list
    theta: list
    dx: list
    dy: list
    events: list
    stop: Optional[EventHit]


def _run_branch(params: Params, init: PhaseState, s_end: float, tol: float,
                events: Sequence[EventSpec], norm_threshold: float,
                max_step: float, max_steps: int) -> _Branch:
    """Integrate from s=0 to s_end (either sign), collecting samples/events."""
    A, B = params.A, params.B
    direction = 1.0 if s_end > 0 else -1.0
    span = abs(s_end)

    guard = EventSpec(NORM_EXCEEDED,
                      lambda s, x, y, th: math.hypot(x, y) - norm_threshold,
                      1, 1)
    all_events = list(events) + [guard]
    ev_counts = [0] * len(all_events)

    sx, sy, st, ss = [init.x], [init.y], [0.0], [0.0]
    k1x, k1y = rhs(params, init)
    sdx, sdy = [k1x], [k1y]
    ev_hits: list[EventHit] = []
    stop: Optional[EventHit] = None

    x0, y0, th0 = init.x, init.y, 0.0
    s0 = 0.0
    ev_vals = [e.fn(0.0, x0, y0, th0) for e in all_events]

    # Initial step size from the RHS magnitude.
    f_norm = math.hypot(k1x, k1y) + abs(x0)
    h = direction * min(max_step, 1e-2 * (1.0 + math.hypot(x0, y0)) / (f_norm + 1e-3))
    h_min = 1e-13 * max(1.0, span)
    err_prev = 1.0
    n_steps = 0

    while stop is None and direction * (s_end - s0) > 1e-14 * max(1.0, span):
        n_steps += 1
        if n_steps > max_steps:
            raise RuntimeError(f"integration exceeded {max_steps} steps at s={s0}")
        if direction * (s0 + h) > direction * s_end:
            h = s_end - s0
        if abs(h) < h_min:
            raise RuntimeError(f"step size underflow at s={s0}")

        # Seven stages; stage x doubles as the theta derivative.
        k1t = x0
        x2 = x0 + h * _A21 * k1x
        y2 = y0 + h * _A21 * k1y
        k2x, k2y, k2t = x2 * y2 + A, -x2 * x2 - B, x2
        x3 = x0 + h * (_A31 * k1x + _A32 * k2x)
        y3 = y0 + h * (_A31 * k1y + _A32 * k2y)
        k3x, k3y, k3t = x3 * y3 + A, -x3 * x3 - B, x3
        x4 = x0 + h * (_A41 * k1x + _A42 * k2x + _A43 * k3x)
        y4 = y0 + h * (_A41 * k1y + _A42 * k2y + _A43 * k3y)
        k4x, k4y, k4t = x4 * y4 + A, -x4 * x4 - B, x4
        x5 = x0 + h * (_A51 * k1x + _A52 * k2x + _A53 * k3x + _A54 * k4x)
        y5 = y0 + h * (_A51 * k1y + _A52 * k2y + _A53 * k3y + _A54 * k4y)
        k5x, k5y, k5t = x5 * y5 + A, -x5 * x5 - B, x5
        x6 = x0 + h * (_A61 * k1x + _A62 * k2x + _A63 * k3x + _A64 * k4x + _A65 * k5x)
        y6 = y0 + h * (_A61 * k1y + _A62 * k2y + _A63 * k3y + _A64 * k4y + _A65 * k5y)
        k6x, k6y, k6t = x6 * y6 + A, -x6 * x6 - B, x6

        x1 = x0 + h * (_B1 * k1x + _B3 * k3x + _B4 * k4x + _B5 * k5x + _B6 * k6x)
        y1 = y0 + h * (_B1 * k1y + _B3 * k3y + _B4 * k4y + _B5 * k5y + _B6 * k6y)
        th1 = th0 + h * (_B1 * k1t + _B3 * k3t + _B4 * k4t + _B5 * k5t + _B6 * k6t)
        k7x, k7y, k7t = x1 * y1 + A, -x1 * x1 - B, x1

        ex = h * (_E1 * k1x + _E3 * k3x + _E4 * k4x + _E5 * k5x + _E6 * k6x + _E7 * k7x)
        ey = h * (_E1 * k1y + _E3 * k3y + _E4 * k4y + _E5 * k5y + _E6 * k6y + _E7 * k7y)
        et = h * (_E1 * k1t + _E3 * k3t + _E4 * k4t + _E5 * k5t + _E6 * k6t + _E7 * k7t)
        err = max(abs(ex), abs(ey), abs(et)) / (tol * abs(h)) if h != 0 else 0.0

        if err > 1.0:
            h *= max(0.2, min(1.0, 0.9 * err ** -0.2))
            continue

        s1 = s0 + h
        u0 = (x0, y0, th0)
        f0 = (k1x, k1y, k1t)
        u1 = (x1, y1, th1)
        f1 = (k7x, k7y, k7t)

        # Event detection on [s0, s1], checking the midpoint too so that a
        # double crossing inside one step is not silently skipped.
        um = _hermite(0.5, h, u0, f0, u1, f1)
        sm = s0 + 0.5 * h
        hits_here = []
        for idx, ev in enumerate(all_events):
            g0 = ev_vals[idx]
            gm = ev.fn(sm, um[0], um[1], um[2])
            g1 = ev.fn(s1, x1, y1, th1)
            for (sa, ga, sb, gb) in ((s0, g0, sm, gm), (sm, gm, s1, g1)):
                crossed = (ga < 0.0 < gb) or (gb < 0.0 < ga) or (gb == 0.0 and ga != 0.0)
                if not crossed:
                    continue
                if ev.direction > 0 and not gb > ga:
                    continue
                if ev.direction < 0 and not gb < ga:
                    continue
                ta, tb, va, vb = (sa - s0) / h, (sb - s0) / h, ga, gb
                while abs(tb - ta) * abs(h) > EVENT_S_TOL:
                    tc = 0.5 * (ta + tb)
                    uc = _hermite(tc, h, u0, f0, u1, f1)
                    gc = ev.fn(s0 + tc * h, uc[0], uc[1], uc[2])
                    if (va < 0.0 < gc) or (gc < 0.0 < va):
                        tb, vb = tc, gc
                    else:
                        ta, va = tc, gc
                t_ev = 0.5 * (ta + tb)
                u_ev = _hermite(t_ev, h, u0, f0, u1, f1)
                hit = EventHit(ev.kind, s0 + t_ev * h,
                               PhaseState(u_ev[0], u_ev[1]), u_ev[2])
                hits_here.append((t_ev, idx, hit))
                break  # at most one root per event per step
            ev_vals[idx] = g1

        hits_here.sort(key=lambda item: item[0])
        stop_pos = len(hits_here)
        for pos, (t_ev, idx, hit) in enumerate(hits_here):
            ev_hits.append(hit)
            ev_counts[idx] += 1
            ev = all_events[idx]
            if ev.terminal is not None and ev_counts[idx] >= ev.terminal:
                stop = hit
                stop_pos = pos
                break

        # Insert located event points as samples (up to the terminal one).
        for t_ev, idx, hit in hits_here[:stop_pos + 1]:
            if abs(hit.s - ss[-1]) > 1e-14 * max(1.0, abs(hit.s)):
                fx, fy = rhs(params, hit.state)
                ss.append(hit.s); sx.append(hit.state.x); sy.append(hit.state.y)
                st.append(hit.theta); sdx.append(fx); sdy.append(fy)
        if stop is not None:
            break

        ss.append(s1); sx.append(x1); sy.append(y1); st.append(th1)
        sdx.append(k7x); sdy.append(k7y)

        s0, x0, y0, th0 = s1, x1, y1, th1
        k1x, k1y = k7x, k7y  # FSAL

        err = max(err, 1e-10)
        fac = 0.9 * err ** -0.14 * err_prev ** 0.08
        h *= max(0.2, min(5.0, fac))
        if abs(h) > max_step:
            h = direction * max_step
        err_prev = err

    return _Branch(ss, sx, sy, st, sdx, sdy, ev_hits, stop)


def integrate(params: Params, init: PhaseState,
              s_span: tuple[float, float] = (0.0, 10.0),
              tol: float = DEFAULT_TOL,
              events: Sequence[EventSpec] = (),
              norm_threshold: float = DEFAULT_NORM_THRESHOLD,
              max_step: float = 0.5,
              max_steps: int = 2_000_000) -> Trajectory:
    """Integrate the system over ``s_span = (s_lo, s_hi)`` with s_lo <= 0 <= s_hi.

    ``theta(0) = 0`` is fixed.  A trajectory whose phase norm exceeds
    ``norm_threshold`` is truncated with a ``norm-exceeds-threshold`` event
    rather than raising.  Event crossings are located by bisection on the
    dense output to an absolute tolerance of 1e-12 in ``s``; the crossing
    direction is taken along the direction of integration (so the backward
    branch sees crossings in the order it is traversed).
    """
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if params.is_null:
        raise ValueError("phase integration requires (A, B) != (0, 0)")
    s_lo, s_hi = s_span
    if not (s_lo <= 0.0 <= s_hi):
        raise ValueError(f"s_span must satisfy s_lo <= 0 <= s_hi, got {s_span}")
    if not (math.isfinite(init.x) and math.isfinite(init.y)):
        raise ValueError("initial state must be finite")
    init = PhaseState(float(init.x), float(init.y))

    fwd = bwd = None
    if s_hi > 0.0:
        fwd = _run_branch(params, init, s_hi, tol, events, norm_threshold,
                          max_step, max_steps)
    if s_lo < 0.0:
        bwd = _run_branch(params, init, s_lo, tol, events, norm_threshold,
                          max_step, max_steps)

    if bwd is not None:
        ss = bwd.s[::-1]
        sx = bwd.x[::-1]
        sy = bwd.y[::-1]
        st = bwd.theta[::-1]
        sdx = bwd.dx[::-1]
        sdy = bwd.dy[::-1]
        ev = bwd.events[::-1]
        if fwd is not None:
            ss += fwd.s[1:]; sx += fwd.x[1:]; sy += fwd.y[1:]
            st += fwd.theta[1:]; sdx += fwd.dx[1:]; sdy += fwd.dy[1:]
            ev = ev + fwd.events
    else:
        assert fwd is not None
        ss, sx, sy, st, sdx, sdy, ev = (fwd.s, fwd.x, fwd.y, fwd.theta,
                                        fwd.dx, fwd.dy, fwd.events)

    return Trajectory(
        params=params,
        s=np.asarray(ss), x=np.asarray(sx), y=np.asarray(sy),
        theta=np.asarray(st), dx=np.asarray(sdx), dy=np.asarray(sdy),
        events=ev,
        forward_stop=fwd.stop if fwd else None,
        backward_stop=bwd.stop if bwd else None,
    )


def first_integral(params: Params, state: PhaseState,
                   theta: float = 0.0) -> Optional[float]:
    """Closed-form conserved quantity, or None when no invariant case applies.

    Shrinking case (A=0, B<0):  x * exp(-(x^2+y^2)/2) after rescaling to B=-1.
    Expanding case (A=0, B>0):  x * exp(+(x^2+y^2)/2) after rescaling to B=+1.
    Rotating case  (B=0, A!=0): (x^2+y^2)/A^2 - (2/A)*theta.

    Rescaling (A, B) by c rescales the phase state by sqrt(c) and leaves
    theta unchanged, so general parameter magnitudes reduce to the three
    normalized cases above.
    """
    A, B = params.A, params.B
    x, y = state
    if A == 0.0 and B != 0.0:
        c = 1.0 / abs(B)
        r2 = (x * x + y * y) * c
        xn = x * math.sqrt(c)
        return xn * math.exp(-r2 / 2.0) if B < 0 else xn * math.exp(r2 / 2.0)
    if B == 0.0 and A != 0.0:
        return (x * x + y * y) / (A * A) - (2.0 / A) * theta
    return None


@dataclass(frozen=True)
class FixedPoint:
    """An equilibrium of the system with its linearization data."""

    state: PhaseState
    eigenvalues: tuple[complex, complex]
    kind: str


def _linearization(state: PhaseState) -> tuple[tuple[complex, complex], str]:
    # Jacobian [[y, x], [-2x, 0]]: trace = y, det = 2 x^2.
    x, y = state
    tr = y
    det = 2.0 * x * x
    disc = tr * tr - 4.0 * det
    sq = cmath.sqrt(disc)
    lam1 = (tr + sq) / 2.0
    lam2 = (tr - sq) / 2.0
    if abs(tr) == 0.0:
        kind = "center"
    else:
        stability = "sink" if tr < 0 else "source"
        shape = "spiral" if disc < 0 else ("node" if disc > 0 else "degenerate-node")
        kind = f"{stability}-{shape}"
    return (lam1, lam2), kind


def fixed_points(params: Params) -> list[FixedPoint]:
    """Equilibria of the system for the given parameters.

    Requires x^2 = -B, so the set is empty for B > 0, and for B = 0 with
    A != 0.  For B < 0 the two points are (beta, -A/beta) and
    (-beta, A/beta) with beta = sqrt(-B); their eigenvalues are reported
    for the actual (un-normalized) system, which for A = 1, B = -beta^2
    gives (-1 +/- sqrt(1 - 8 beta^4)) / (2 beta) at (beta, -1/beta), a
    spiral for beta > 8**-0.25 and a node below it.  For A = 0, B < 0 the
    points (+/-beta, 0) are linear centers.  A = B = 0 degenerates to a
    line of equilibria (the whole y-axis) and returns the empty list.
    """
    A, B = params.A, params.B
    if B >= 0:
        return []
    beta = math.sqrt(-B)
    out = []
    for xs in (beta, -beta):
        state = PhaseState(xs, -A / xs)
        eig, kind = _linearization(state)
        out.append(FixedPoint(state, eig, kind))
    return out


def normalize_params(params: Params) -> tuple[Params, float, bool]:
    """Reduce (A, B) to the solver's normal form.

    Returns ``(normalized, k, reflected)`` where the normalized system is
    obtained by reflecting the curve if A < 0 (mapping (A, B) -> (-A, B)
    and states (x, y) -> (-x, y)) and rescaling by ``c = k**2`` (mapping
    (A, B) -> c*(A, B), states -> k*states, arc length -> s/k).  For
    A != 0 the normal form has A = 1; for A = 0, it has |B| = 1.
    """
    A, B = params.A, params.B
    reflected = A < 0
    if reflected:
        A = -A
    c = 1.0 / A if A != 0.0 else (1.0 / abs(B) if B != 0.0 else 1.0)
    k = math.sqrt(c)
    return Params(A * c, B * c), k, reflected
