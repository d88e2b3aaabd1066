"""Reconstruction of plane curves from phase trajectories, and their diagnostics.

A trajectory (x, y, theta)(s) determines the arc-length-parametrized curve

    X(s) = exp(i*theta(s)) * (x(s) + i*y(s)) / (A - i*B)

with tangent T = exp(i*theta) and curvature k = x.  The helpers here compute
the polar decomposition r*exp(i*phi) of X, total curvature with a certified
Gaussian tail for expanding curves, transversal self-intersections with the
loop-area law, excursion splitting for shrinking curves, and the asymptotic
growing direction of spiral arms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .phase import Params, Trajectory

__all__ = [
    "PlaneCurve",
    "PolarTrace",
    "LoopReport",
    "TotalCurvature",
    "AsymptoticEnd",
    "ExcursionReport",
    "reconstruct",
    "polar",
    "total_curvature",
    "self_intersections",
    "excursions",
    "asymptotic_direction",
    "soliton_identity_residual",
]


@dataclass
class PlaneCurve:
    """Arc-length-sampled plane curve with tangent angle and curvature."""

    params: Params
    s: np.ndarray
    points: np.ndarray        # complex positions X(s)
    theta: np.ndarray         # tangent angle, T = exp(i*theta)
    curvature: np.ndarray     # k(s) = x(s)

    def __len__(self) -> int:
        return len(self.s)

    @property
    def tangents(self) -> np.ndarray:
        return np.exp(1j * self.theta)

    @property
    def xy(self) -> np.ndarray:
        return np.column_stack([self.points.real, self.points.imag])

    def point_at(self, s_query) -> np.ndarray:
        """Cubic Hermite evaluation of X between samples (X' = exp(i*theta))."""
        sq = np.atleast_1d(np.asarray(s_query, dtype=float))
        j = np.clip(np.searchsorted(self.s, sq, side="right") - 1, 0, len(self.s) - 2)
        h = self.s[j + 1] - self.s[j]
        t = np.clip((sq - self.s[j]) / h, 0.0, 1.0)
        tang = np.exp(1j * self.theta)
        h00 = (1.0 + 2.0 * t) * (1.0 - t) ** 2
        h10 = t * (1.0 - t) ** 2
        h01 = t * t * (3.0 - 2.0 * t)
        h11 = t * t * (t - 1.0)
        return (h00 * self.points[j] + h10 * h * tang[j]
                + h01 * self.points[j + 1] + h11 * h * tang[j + 1])

    def theta_at(self, s_query) -> np.ndarray:
        sq = np.atleast_1d(np.asarray(s_query, dtype=float))
        j = np.clip(np.searchsorted(self.s, sq, side="right") - 1, 0, len(self.s) - 2)
        h = self.s[j + 1] - self.s[j]
        t = np.clip((sq - self.s[j]) / h, 0.0, 1.0)
        h00 = (1.0 + 2.0 * t) * (1.0 - t) ** 2
        h10 = t * (1.0 - t) ** 2
        h01 = t * t * (3.0 - 2.0 * t)
        h11 = t * t * (t - 1.0)
        return (h00 * self.theta[j] + h10 * h * self.curvature[j]
                + h01 * self.theta[j + 1] + h11 * h * self.curvature[j + 1])


@dataclass
class PolarTrace:
    """Polar decomposition X = r*exp(i*phi) with tangential/normal projections.

    tau = <X, T> and nu = <X, N>; the identities
    tau = (A*x - B*y)/(A^2+B^2), nu = (B*x + A*y)/(A^2+B^2) and
    r * sqrt(A^2+B^2) = sqrt(x^2+y^2) hold per sample.  phi is unwrapped
    (no 2*pi jumps between adjacent samples); a curve passing exactly
    through the origin has an intrinsic jump of pi there.
    """

    r: np.ndarray
    phi: np.ndarray
    tau: np.ndarray
    nu: np.ndarray


def reconstruct(trajectory: Trajectory, max_ds: Optional[float] = None,
                max_dtheta: Optional[float] = None) -> PlaneCurve:
    """Build the plane curve from a trajectory via the closed-form map.

    Points come directly from X = exp(i*theta)*(x+i*y)/(A-i*B) per sample
    (never from integrating the tangent).  With ``max_ds``/``max_dtheta``
    the sample grid is refined by dense-output interpolation so that no
    interval exceeds the given arc length / turning angle; dense sampling
    matters for intersection detection and rendering.
    """
    params = trajectory.params
    if params.is_null:
        raise ValueError("reconstruction requires (A, B) != (0, 0)")
    s = trajectory.s
    if max_ds is not None or max_dtheta is not None:
        pieces = []
        for i in range(len(s) - 1):
            ds = s[i + 1] - s[i]
            n_sub = 1
            if max_ds is not None:
                n_sub = max(n_sub, int(math.ceil(ds / max_ds)))
            if max_dtheta is not None:
                dth = abs(trajectory.theta[i + 1] - trajectory.theta[i])
                n_sub = max(n_sub, int(math.ceil(dth / max_dtheta)))
            pieces.append(np.linspace(s[i], s[i + 1], n_sub + 1)[:-1])
        pieces.append(np.array([s[-1]]))
        s = np.concatenate(pieces)
        x, y, theta = trajectory.interpolate(s)
    else:
        x, y, theta = trajectory.x, trajectory.y, trajectory.theta
    w = (x + 1j * y) / (params.A - 1j * params.B)
    points = np.exp(1j * theta) * w
    return PlaneCurve(params=params, s=np.asarray(s, dtype=float),
                      points=points, theta=np.asarray(theta, dtype=float),
                      curvature=np.asarray(x, dtype=float))


def polar(curve: PlaneCurve) -> PolarTrace:
    """Polar trace (r, unwrapped phi, tau, nu) of a curve."""
    A, B = curve.params.A, curve.params.B
    z = curve.points * np.exp(-1j * curve.theta)   # tau + i*nu
    tau, nu = z.real, z.imag
    r = np.abs(curve.points)
    phi = curve.theta + np.unwrap(np.arctan2(nu, tau))
    return PolarTrace(r=r, phi=phi, tau=tau, nu=nu)


def soliton_identity_residual(curve: PlaneCurve) -> float:
    """max |A*<X,T> + B*<X,N> - k| over the samples."""
    A, B = curve.params.A, curve.params.B
    z = curve.points * np.exp(-1j * curve.theta)
    return float(np.max(np.abs(A * z.real + B * z.imag - curve.curvature)))


@dataclass
class TotalCurvature:
    """Total curvature of an expanding curve, or a divergence flag.

    ``value = span_integral + tail`` where the tail beyond each trajectory
    end is evaluated from the conserved quantity x*exp((x^2+y^2)/2) by
    quadrature, with ``tail_bound`` a rigorous Gaussian upper bound on it.
    """

    value: Optional[float]
    span_integral: float
    tail: float
    tail_bound: float
    diverged: bool
    reason: Optional[str] = None


def total_curvature(trajectory: Trajectory) -> TotalCurvature:
    """Integral of the curvature over the whole curve.

    Finite only for the expanding case A = 0, B > 0, where the curvature
    decays like a Gaussian in the radius; every other parameter class has
    non-decaying curvature and is reported with ``diverged=True``.
    """
    params = trajectory.params
    A, B = params.A, params.B
    span_integral = float(trajectory.theta[-1] - trajectory.theta[0])
    if not (A == 0.0 and B > 0.0):
        return TotalCurvature(None, span_integral, 0.0, math.inf, True,
                              reason="curvature does not decay for this class")
    sb = math.sqrt(B)
    xn = trajectory.x / sb
    yn = trajectory.y / sb
    if np.any(xn < 0.0):
        xn, yn = -xn, -yn
        span_integral = -span_integral
    # Conserved value, evaluated where x is largest for best conditioning.
    i0 = int(np.argmax(xn))
    c = xn[i0] * math.exp((xn[i0] ** 2 + yn[i0] ** 2) / 2.0)

    def x_of_r(r):
        return c * np.exp(-r * r / 2.0)

    tail = 0.0
    tail_bound = 0.0
    for i_end in (0, -1):
        r_end = math.hypot(xn[i_end], yn[i_end])
        x_end = x_of_r(r_end)
        if x_end >= r_end:
            return TotalCurvature(None, span_integral, 0.0, math.inf, True,
                                  reason="trajectory too short: end still near "
                                         "the turning radius")
        # u-substitution r = r_end + u**2 removes nothing here (no root at
        # the end); the integrand is smooth and Gaussian-decaying.
        val, err = quad(lambda r: 2.0 * x_of_r(r) * r
                        / np.sqrt(r * r - x_of_r(r) ** 2),
                        r_end, np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)
        tail += 0.5 * val  # each end owns one arm's half of the symmetric form
        gamma = math.sqrt(1.0 - (x_end / r_end) ** 2)
        tail_bound += c * math.exp(-r_end ** 2 / 2.0) / (gamma * r_end)
    return TotalCurvature(span_integral + tail, span_integral, tail,
                          tail_bound, False)


@dataclass
class LoopReport:
    """One transversal double point of a curve, with loop analysis.

    ``s_first < s_second`` are the two arc parameters visiting the double
    point; the loop is the curve piece between them.  ``interior_angle``
    (alpha, in (0, 2*pi)), ``enclosed_area`` and ``theta_gain`` are filled
    for resolved innermost loops; ``predicted_area = -(pi+alpha)/(2B)``
    only when B < 0.  ``ccw`` tells whether the loop as parametrized
    encloses its region on the left.
    """

    double_point: tuple[float, float]
    s_first: float
    s_second: float
    resolved: bool
    innermost: bool = False
    interior_angle: Optional[float] = None
    enclosed_area: Optional[float] = None
    predicted_area: Optional[float] = None
    theta_gain: Optional[float] = None
    ccw: Optional[bool] = None


def _segment_pairs(points: np.ndarray, scale: float):
    """Candidate non-adjacent segment pairs via a uniform spatial grid."""
    px, py = points.real, points.imag
    n_seg = len(points) - 1
    seg_len = np.abs(np.diff(points))
    cell = max(float(seg_len.max()), 1e-9 * scale)
    x0 = np.minimum(px[:-1], px[1:])
    x1 = np.maximum(px[:-1], px[1:])
    y0 = np.minimum(py[:-1], py[1:])
    y1 = np.maximum(py[:-1], py[1:])
    cx0 = np.floor(x0 / cell).astype(np.int64)
    cx1 = np.floor(x1 / cell).astype(np.int64)
    cy0 = np.floor(y0 / cell).astype(np.int64)
    cy1 = np.floor(y1 / cell).astype(np.int64)
    grid: dict[tuple[int, int], list[int]] = {}
    for i in range(n_seg):
        for cx in range(cx0[i], cx1[i] + 1):
            for cy in range(cy0[i], cy1[i] + 1):
                grid.setdefault((cx, cy), []).append(i)
    pairs = set()
    for bucket in grid.values():
        m = len(bucket)
        if m < 2:
            continue
        for a in range(m):
            ia = bucket[a]
            for b in range(a + 1, m):
                ib = bucket[b]
                lo, hi = (ia, ib) if ia < ib else (ib, ia)
                if hi - lo > 1:
                    pairs.add((lo, hi))
    return sorted(pairs)


def _chord_intersection(p1, p2, p3, p4, lo=0.0, hi=1.0):
    """Parameters (t, u) of the crossing of chords p1p2 and p3p4, or None."""
    d1 = p2 - p1
    d2 = p4 - p3
    r = p3 - p1
    den = d1.real * d2.imag - d1.imag * d2.real
    if den == 0.0:
        return None
    t = (r.real * d2.imag - r.imag * d2.real) / den
    u = (r.real * d1.imag - r.imag * d1.real) / den
    if lo <= t < hi and lo <= u < hi:
        return t, u
    return None


def _refine_crossing(curve: PlaneCurve, sa0, sa1, sb0, sb1, s_tol):
    """Shrink the two parameter intervals around a crossing by bisection."""
    for _ in range(80):
        if (sa1 - sa0) <= s_tol and (sb1 - sb0) <= s_tol:
            break
        sam = 0.5 * (sa0 + sa1)
        sbm = 0.5 * (sb0 + sb1)
        qs = curve.point_at([sa0, sam, sa1, sb0, sbm, sb1])
        found = None
        for a0, a1, pa0, pa1 in ((sa0, sam, qs[0], qs[1]), (sam, sa1, qs[1], qs[2])):
            for b0, b1, pb0, pb1 in ((sb0, sbm, qs[3], qs[4]), (sbm, sb1, qs[4], qs[5])):
                if _chord_intersection(pa0, pa1, pb0, pb1, lo=-1e-9, hi=1.0 + 1e-9):
                    found = (a0, a1, b0, b1)
                    break
            if found:
                break
        if found is None:
            return None
        sa0, sa1, sb0, sb1 = found
    return 0.5 * (sa0 + sa1), 0.5 * (sb0 + sb1)


def _shoelace(points: np.ndarray) -> float:
    x, y = points.real, points.imag
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def self_intersections(curve: PlaneCurve, s_tol: float = 1e-10,
                       loop_samples: int = 2048) -> list[LoopReport]:
    """All transversal self-intersections of the curve, with loop reports.

    Chord crossings of the sampled polyline are refined by bisection on the
    two arc parameters using dense-output evaluation.  Innermost loops (no
    other double point strictly inside their parameter interval) get the
    interior angle at the double point, the enclosed area by the shoelace
    formula with Richardson extrapolation over two sampling densities, and
    the predicted area -(pi+alpha)/(2B) when B < 0.  Tangential crossings
    that cannot be refined are returned with ``resolved=False`` instead of
    being silently classified.
    """
    pts = curve.points
    if len(pts) < 4:
        return []
    scale = float(np.max(np.abs(pts))) + 1e-300
    found: list[tuple[float, float, bool]] = []
    for i, j in _segment_pairs(pts, scale):
        hit = _chord_intersection(pts[i], pts[i + 1], pts[j], pts[j + 1])
        if hit is None:
            continue
        refined = _refine_crossing(curve, curve.s[i], curve.s[i + 1],
                                   curve.s[j], curve.s[j + 1],
                                   max(s_tol, 1e-14 * scale))
        if refined is None:
            t, u = hit
            sa = curve.s[i] + t * (curve.s[i + 1] - curve.s[i])
            sb = curve.s[j] + u * (curve.s[j + 1] - curve.s[j])
            found.append((sa, sb, False))
        else:
            found.append((refined[0], refined[1], True))

    # Deduplicate crossings located from neighbouring segment pairs.
    found.sort()
    dedup: list[tuple[float, float, bool]] = []
    min_sep = max(10.0 * s_tol, 1e-9 * (curve.s[-1] - curve.s[0]))
    for sa, sb, ok in found:
        if any(abs(sa - a) < min_sep and abs(sb - b) < min_sep
               for a, b, _ in dedup):
            continue
        dedup.append((sa, sb, ok))

    reports: list[LoopReport] = []
    for sa, sb, ok in dedup:
        p = complex(curve.point_at([sa, sb]).mean())
        rep = LoopReport(double_point=(p.real, p.imag),
                         s_first=sa, s_second=sb, resolved=ok)
        reports.append(rep)

    for rep in reports:
        inner = [r for r in reports if r is not rep
                 and rep.s_first < r.s_first and r.s_second < rep.s_second]
        rep.innermost = not inner
        if not (rep.resolved and rep.innermost):
            continue
        sa, sb = rep.s_first, rep.s_second
        th_a = float(curve.theta_at([sa])[0])
        th_b = float(curve.theta_at([sb])[0])
        rep.theta_gain = th_b - th_a
        grid = np.linspace(sa, sb, loop_samples + 1)[:-1]
        poly = curve.point_at(grid)
        area2 = _shoelace(poly)
        area1 = _shoelace(poly[::2])
        signed = (4.0 * area2 - area1) / 3.0
        rep.ccw = signed > 0
        rep.enclosed_area = abs(signed)
        ta = np.exp(1j * th_a)
        tb = np.exp(1j * th_b)
        if rep.ccw:
            eps_turn = float(np.angle(ta / tb))   # from T(sb) to T(sa)
        else:
            eps_turn = float(np.angle(tb / ta))   # reversed traversal
        if abs(abs(eps_turn) - math.pi) < 1e-9:
            rep.resolved = False                  # tangential double point
            continue
        rep.interior_angle = math.pi - eps_turn
        if curve.params.B < 0:
            rep.predicted_area = -(math.pi + rep.interior_angle) / (2.0 * curve.params.B)
    return reports


@dataclass
class ExcursionReport:
    """Excursion decomposition of a shrinking-curve trajectory."""

    circle: bool
    excursions: list[tuple[float, float, float]]   # (s_start, s_end, delta_theta)


def excursions(trajectory: Trajectory) -> ExcursionReport:
    """Split a shrinking-case trajectory at its inner-radius touches.

    Requires A = 0, B < 0.  Inner touches are the y = 0 crossings where the
    curvature magnitude sits on its minimum branch (|x| below the turning
    value sqrt(-B)); the tangent-angle gain between consecutive inner
    touches is constant along the orbit.  The circle (fixed point) case is
    reported as such; spans holding less than one full excursion raise.
    """
    params = trajectory.params
    if params.A != 0.0 or params.B >= 0.0:
        raise ValueError("excursions require the shrinking case A=0, B<0")
    beta = math.sqrt(-params.B)
    if (np.max(np.abs(np.abs(trajectory.x) - beta)) < 1e-9 * beta
            and np.max(np.abs(trajectory.y)) < 1e-9 * beta):
        return ExcursionReport(circle=True, excursions=[])

    y = trajectory.y
    s = trajectory.s
    touches = []
    for i in np.nonzero((y[:-1] * y[1:] < 0) | ((y[1:] == 0) & (y[:-1] != 0)))[0]:
        lo, hi = s[i], s[i + 1]
        ylo = y[i]
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            ym = trajectory.interpolate(mid)[1][0]
            if (ylo < 0 < ym) or (ym < 0 < ylo):
                hi = mid
            else:
                lo, ylo = mid, ym
            if hi - lo < 1e-13 * max(1.0, abs(hi)):
                break
        s_t = 0.5 * (lo + hi)
        x_t, _, th_t = (v[0] for v in trajectory.interpolate(s_t))
        if abs(x_t) < beta:
            touches.append((s_t, th_t))
    if len(touches) < 2:
        raise ValueError("span holds less than one full excursion")
    out = [(touches[i][0], touches[i + 1][0], touches[i + 1][1] - touches[i][1])
           for i in range(len(touches) - 1)]
    return ExcursionReport(circle=False, excursions=out)


@dataclass(frozen=True)
class AsymptoticEnd:
    """Empirical vs. theoretical limiting growing direction at one curve end."""

    end: int                      # +1 forward, -1 backward
    empirical: complex            # r*T/X at the end sample
    theoretical: complex
    deviation: float
    r_growth: float               # r(end) / min r over the curve


def asymptotic_direction(curve: PlaneCurve,
                         growth_factor: float = 50.0) -> list[AsymptoticEnd]:
    """Limit of r*T/X on each spiral arm whose radius grew enough.

    Spiral arms exist only for A != 0.  The theoretical limit is
    +/-(B+iA)/sqrt(A^2+B^2) at the forward/backward end for B >= 0; for
    B < 0 the outgoing arm of a comet satisfies the same limit with
    (-B-iA) in place of (B+iA).  An end qualifies once its radius exceeds
    ``growth_factor`` times the curve's minimum radius; the deviation is
    reported rather than asserted, since the convergence rate is not
    quantified.
    """
    A, B = curve.params.A, curve.params.B
    if A == 0.0:
        raise ValueError("asymptotic direction requires the rotating case A != 0")
    r = np.abs(curve.points)
    r_min = max(float(r.min()), 1e-12 * float(r.max()))
    mag = math.hypot(A, B)
    base = complex(B, A) / mag if B >= 0 else complex(-B, -A) / mag
    out = []
    for end, idx in ((1, -1), (-1, 0)):
        if r[idx] < growth_factor * r_min:
            continue
        emp = complex(r[idx] * np.exp(1j * curve.theta[idx]) / curve.points[idx])
        theo = end * base
        out.append(AsymptoticEnd(end=end, empirical=emp, theoretical=theo,
                                 deviation=abs(emp - theo),
                                 r_growth=float(r[idx]) / r_min))
    if not out:
        raise ValueError(
            f"no curve end grew its radius by {growth_factor}x; integrate further")
    return out
