"""Named figure recipes: every curve family rendered to files.

Each figure has a canonical name, a deterministic builder returning the
curves it shows, and a frozen signature (bounding box, tangent winding,
self-intersection count) used by the acceptance suite to confirm the
regenerated figure matches qualitatively without comparing pixels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .flow import grim_reaper
from .geometry import PlaneCurve, reconstruct, self_intersections, total_curvature
from .phase import Params, PhaseState, Trajectory, integrate
from .solvers import find_abresch_langer, find_comet_spiral

__all__ = ["FigureSpec", "FigureData", "figure_names", "resolve_name",
           "build_figure", "measure_signature", "render_figure", "REGISTRY"]


@dataclass(frozen=True)
class FigureSpec:
    name: str
    title: str
    config: dict
    build: Callable[[], "FigureData"]
    aliases: tuple[str, ...] = ()
    signature: Optional[dict] = None


@dataclass
class FigureData:
    curves: list[tuple[str, PlaneCurve]]
    overlays: list[np.ndarray] = field(default_factory=list)  # decoration polylines


def _curve(A, B, x0, y0, span, tol=1e-10, max_ds=0.05, max_dtheta=0.08):
    tr = integrate(Params(A, B), PhaseState(x0, y0), (-span, span), tol=tol)
    return reconstruct(tr, max_ds=max_ds, max_dtheta=max_dtheta)


def _circle_overlay(radius, n=512):
    ang = np.linspace(0.0, 2.0 * math.pi, n)
    return radius * np.exp(1j * ang)


def _slice_trajectory(tr: Trajectory, keep: np.ndarray) -> Trajectory:
    idx = np.nonzero(keep)[0]
    lo, hi = idx[0], idx[-1] + 1
    s_lo, s_hi = tr.s[lo], tr.s[hi - 1]
    return Trajectory(
        params=tr.params, s=tr.s[lo:hi], x=tr.x[lo:hi], y=tr.y[lo:hi],
        theta=tr.theta[lo:hi], dx=tr.dx[lo:hi], dy=tr.dy[lo:hi],
        events=[e for e in tr.events if s_lo <= e.s <= s_hi])


def _grim_reaper_fig():
    return FigureData(curves=[("grim reaper", grim_reaper(1.0, half_width=1.45))])


def _expander_cone_fig():
    tr = integrate(Params(0.0, 1.0), PhaseState(1.0, 0.0), (-9.0, 9.0), tol=1e-11)
    c = reconstruct(tr, max_ds=0.02)
    r_max = float(np.abs(c.points).max())
    rays = []
    for idx in (0, -1):
        direction = c.points[idx] / abs(c.points[idx])
        rays.append(np.array([0.0 + 0.0j, 1.2 * r_max * direction]))
    return FigureData(curves=[("expander", c)], overlays=rays)


def _expander_family_fig():
    curves = []
    for x0 in (0.25, 1.0, 2.5):
        tr = integrate(Params(0.0, 1.0), PhaseState(x0, 0.0), (-8.0, 8.0), tol=1e-11)
        curves.append((f"r_min = {x0}", reconstruct(tr, max_ds=0.02)))
    return FigureData(curves=curves)


def _al_fig(p, q):
    def build():
        res = find_abresch_langer(p, q)
        c = reconstruct(res.trajectory, max_ds=0.02, max_dtheta=0.05)
        return FigureData(curves=[(f"p={p}, q={q}", c)],
                          overlays=[_circle_overlay(res.details["r_min"]),
                                    _circle_overlay(res.parameter)])
    return build


def _spiral_fig(A, B, x0, y0, span):
    def build():
        data = FigureData(curves=[(f"A={A}, B={B}", _curve(A, B, x0, y0, span))])
        if B < 0:
            data.overlays.append(_circle_overlay(1.0 / math.sqrt(-B)))
        return data
    return build


def _comet_fig(B, r_cut_factor=6.0):
    def build():
        res = find_comet_spiral(Params(1.0, B))
        tr = res.trajectory
        beta = math.sqrt(-B)
        norm_cut = (r_cut_factor / beta) * math.hypot(1.0, B)
        c = reconstruct(_slice_trajectory(tr, np.hypot(tr.x, tr.y) <= norm_cut),
                        max_ds=0.05, max_dtheta=0.08)
        return FigureData(curves=[(f"comet, B={B}", c)],
                          overlays=[_circle_overlay(1.0 / beta)])
    return build


def _spec(name, title, config, build, aliases=(), signature=None):
    return FigureSpec(name=name, title=title, config=config, build=build,
                      aliases=tuple(aliases), signature=signature)


_FIGURES = [
    _spec("grim-reaper", "Grim Reaper: translates under the flow",
          {"curve": "graph of -log(cos x)", "scale": 1.0},
          _grim_reaper_fig, aliases=("GrimReaper",),
          signature={"bbox": (-1.45, 1.45, 0.0, 2.1435), "winding": 0,
                     "crossings": 0}),
    _spec("expander-cone", "A=0, B=1: expander asymptotic to a cone",
          {"A": 0.0, "B": 1.0, "x0": 1.0, "span": 9.0},
          _expander_cone_fig, aliases=("graf1",),
          signature={"bbox": (-8.0231, 8.0231, 0.5267, 4.7358), "winding": 0,
                     "crossings": 0}),
    _spec("expander-family", "A=0, B=1: total curvature grows with r_min",
          {"A": 0.0, "B": 1.0, "x0": [0.25, 1.0, 2.5], "span": 8.0},
          _expander_family_fig, aliases=("graf2",),
          signature={"bbox": (-7.8055, 7.8055, 0.1140, 6.2872), "winding": 0,
                     "crossings": 0}),
    _spec("al-2-3", "A=0, B=-1: closed shrinking curve, p=2, q=3",
          {"A": 0.0, "B": -1.0, "p": 2, "q": 3},
          _al_fig(2, 3), aliases=("AL1",),
          signature={"bbox": (-1.9336, 1.9336, -1.9336, 1.9336), "winding": 2,
                     "crossings": 3}),
    _spec("al-7-10", "A=0, B=-1: closed shrinking curve, p=7, q=10",
          {"A": 0.0, "B": -1.0, "p": 7, "q": 10},
          _al_fig(7, 10), aliases=("AL2",),
          signature={"bbox": (-1.3658, 1.3658, -1.3658, 1.3658), "winding": 7,
                     "crossings": 60}),
    _spec("al-20-31", "A=0, B=-1: closed shrinking curve, p=20, q=31",
          {"A": 0.0, "B": -1.0, "p": 20, "q": 31},
          _al_fig(20, 31), aliases=("AL3",),
          signature={"bbox": (-2.1979, 2.1979, -2.1979, 2.1979), "winding": 20,
                     "crossings": 1209}),
    _spec("al-41-58", "A=0, B=-1: closed shrinking curve with high p, q",
          {"A": 0.0, "B": -1.0, "p": 41, "q": 58},
          _al_fig(41, 58), aliases=("AL4",),
          signature={"bbox": (-1.0471, 1.0471, -1.0471, 1.0471), "winding": 41,
                     "crossings": 4699}),
    _spec("yin-yang", "A=1, B=0: the symmetric rotator",
          {"A": 1.0, "B": 0.0, "x0": 0.0, "y0": 0.0, "span": 120.0},
          _spiral_fig(1.0, 0.0, 0.0, 0.0, 120.0),
          aliases=("A1B0samhverfi", "yinyang"),
          signature={"bbox": (-7.0019, 7.1636, -7.1016, 7.0541), "winding": 3,
                     "crossings": 0}),
    _spec("rotator-outer", "A=1, B=0: rotator far from the origin",
          {"A": 1.0, "B": 0.0, "x0": 0.0, "y0": 3.0, "span": 90.0},
          _spiral_fig(1.0, 0.0, 0.0, 3.0, 90.0), aliases=("A1B0b3",),
          signature={"bbox": (-7.3242, 7.2805, -7.3618, 7.0028), "winding": 2,
                     "crossings": 0}),
    _spec("rotating-expander", "A=1, B=0.25: symmetric rotating expander",
          {"A": 1.0, "B": 0.25, "x0": 0.0, "y0": 0.0, "span": 40.0},
          _spiral_fig(1.0, 0.25, 0.0, 0.0, 40.0), aliases=("A1B025samhverfi",),
          signature={"bbox": (-9.0957, 9.8691, -9.1888, 9.7089), "winding": 1,
                     "crossings": 0}),
    _spec("rotating-expander-outer", "A=1, B=0.25: rotating expander, outer start",
          {"A": 1.0, "B": 0.25, "x0": 0.0, "y0": 3.0, "span": 40.0},
          _spiral_fig(1.0, 0.25, 0.0, 3.0, 40.0), aliases=("A1B025b3",),
          signature={"bbox": (-11.3459, 9.3564, -11.2359, 10.0071), "winding": 1,
                     "crossings": 0}),
    _spec("rotating-shrinker-0.05", "A=1, B=-0.05: symmetric two-sided shrinker",
          {"A": 1.0, "B": -0.05, "x0": 0.0, "y0": 0.0, "span": 80.0},
          _spiral_fig(1.0, -0.05, 0.0, 0.0, 80.0), aliases=("A1Bm005samhverfi",),
          signature={"bbox": (-4.4948, 4.4904, -4.4961, 4.4811), "winding": 2,
                     "crossings": 0}),
    _spec("rotating-shrinker-0.05-outside",
          "A=1, B=-0.05: starting outside the limit circle",
          {"A": 1.0, "B": -0.05, "x0": 0.0, "y0": 8.0, "span": 80.0},
          _spiral_fig(1.0, -0.05, 0.0, 8.0, 80.0), aliases=("A1Bm005b8",),
          signature={"bbox": (-7.9889, 7.9789, -8.0545, 7.8564), "winding": 2,
                     "crossings": 0}),
    _spec("comet-0.05", "A=1, B=-0.05: the comet spiral",
          {"A": 1.0, "B": -0.05, "r_cut": 6.0},
          _comet_fig(-0.05), aliases=("A1Bm005halastjarnan",),
          signature={"bbox": (-26.8483, 26.7790, -26.6290, 26.8466),
                     "winding": 10, "crossings": 0}),
    _spec("rotating-shrinker-0.25", "A=1, B=-0.25: symmetric two-sided shrinker",
          {"A": 1.0, "B": -0.25, "x0": 0.0, "y0": 0.0, "span": 45.0},
          _spiral_fig(1.0, -0.25, 0.0, 0.0, 45.0), aliases=("A1Bm025samhverfi",),
          signature={"bbox": (-2.0885, 2.0100, -2.0951, 2.0175), "winding": 3,
                     "crossings": 1}),
    _spec("rotating-shrinker-0.25-loops",
          "A=1, B=-0.25: typical curve with loops",
          {"A": 1.0, "B": -0.25, "x0": 0.0, "y0": 1.5, "span": 45.0},
          _spiral_fig(1.0, -0.25, 0.0, 1.5, 45.0), aliases=("A1Bm025b15",),
          signature={"bbox": (-2.6722, 2.6772, -2.6956, 2.5850), "winding": 4,
                     "crossings": 5}),
    _spec("comet-0.25", "A=1, B=-0.25: the comet spiral",
          {"A": 1.0, "B": -0.25, "r_cut": 6.0},
          _comet_fig(-0.25), aliases=("A1Bm025halastjarnan",),
          signature={"bbox": (-11.9580, 12.2154, -11.8942, 12.0382),
                     "winding": 3, "crossings": 0}),
    _spec("rotating-shrinker-5", "A=1, B=-5: symmetric curve, no longer embedded",
          {"A": 1.0, "B": -5.0, "x0": 0.0, "y0": 0.0, "span": 25.0},
          _spiral_fig(1.0, -5.0, 0.0, 0.0, 25.0),
          aliases=("A1Bm1samhverfi", "A1Bm5samhverfi"),
          signature={"bbox": (-0.5092, 0.3212, -0.4354, 0.3988), "winding": 4,
                     "crossings": 13}),
    _spec("comet-5", "A=1, B=-5: the comet spiral, not embedded",
          {"A": 1.0, "B": -5.0, "r_cut": 6.0},
          _comet_fig(-5.0), aliases=("A1Bm5halastjarnan",),
          signature={"bbox": (-2.6878, 2.6925, -2.6903, 2.6926), "winding": 6,
                     "crossings": 28}),
]

REGISTRY: dict[str, FigureSpec] = {}
for _fig in _FIGURES:
    REGISTRY[_fig.name] = _fig
_ALIASES: dict[str, str] = {}
for _fig in _FIGURES:
    for _a in _fig.aliases:
        _ALIASES[_a.lower()] = _fig.name


def figure_names() -> list[str]:
    return [f.name for f in _FIGURES]


def resolve_name(name: str) -> str:
    if name in REGISTRY:
        return name
    key = name.lower()
    if key in REGISTRY:
        return key
    if key in _ALIASES:
        return _ALIASES[key]
    raise KeyError(f"unknown figure '{name}'; known: {', '.join(figure_names())}")


def build_figure(name: str) -> tuple[FigureSpec, FigureData]:
    spec = REGISTRY[resolve_name(name)]
    return spec, spec.build()


def measure_signature(data: FigureData) -> dict:
    """Bounding box, tangent winding number and self-intersection count."""
    pts = np.concatenate([c.points for _, c in data.curves])
    winding = 0
    crossings = 0
    for _, c in data.curves:
        winding = max(winding,
                      int((c.theta.max() - c.theta.min()) / (2.0 * math.pi)))
        crossings += len(self_intersections(c))
    return {
        "bbox": (float(pts.real.min()), float(pts.real.max()),
                 float(pts.imag.min()), float(pts.imag.max())),
        "winding": winding,
        "crossings": crossings,
    }


def render_figure(name: str, png_path: str, dpi: int = 150
                  ) -> tuple[FigureSpec, FigureData, dict]:
    """Build a figure, render it to ``png_path``, return the measured signature."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    spec, data = build_figure(name)
    fig, ax = plt.subplots(figsize=(6.0, 6.0))
    for poly in data.overlays:
        ax.plot(poly.real, poly.imag, color="0.75", lw=0.8, ls="--", zorder=1)
    for label, curve in data.curves:
        ax.plot(curve.points.real, curve.points.imag, lw=0.9, label=label,
                zorder=2)
    ax.set_aspect("equal")
    ax.set_title(spec.title, fontsize=10)
    if len(data.curves) > 1:
        ax.legend(fontsize=8, loc="upper right")
    ax.tick_params(labelsize=8)
    fig.tight_layout()
    fig.savefig(png_path, dpi=dpi)
    plt.close(fig)
    return spec, data, measure_signature(data)
