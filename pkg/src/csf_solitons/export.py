"""Deterministic CSV / JSON / SVG writers for curves and solver results.

All artifacts embed the fully resolved run configuration.  CSV carries 17
significant digits so doubles round-trip exactly; JSON payloads carry the
versioned schema tag; SVG is a dependency-free polyline rendering whose
only non-reproducible field (the timestamp) can be suppressed.
"""

from __future__ import annotations

import json
import math
from datetime import datetime, timezone
from typing import Optional, TextIO

import numpy as np

from .geometry import PlaneCurve, polar, reconstruct
from .phase import Trajectory

SCHEMA = "csf-solitons/1"

CSV_COLUMNS = ("s", "x", "y", "theta", "px", "py", "r", "phi")

__all__ = ["SCHEMA", "CSV_COLUMNS", "curve_table", "write_csv",
           "json_payload", "write_json", "write_svg"]


def _f17(v: float) -> str:
    return format(float(v), ".17g")


def curve_table(trajectory: Trajectory,
                curve: Optional[PlaneCurve] = None) -> dict[str, np.ndarray]:
    """Column table ``s,x,y,theta,px,py,r,phi`` for a trajectory.

    When ``curve`` is given its (denser) sample grid wins and the phase
    columns are interpolated onto it.
    """
    if curve is None:
        curve = reconstruct(trajectory)
    if len(curve) == len(trajectory.s) and np.array_equal(curve.s, trajectory.s):
        x, y, theta = trajectory.x, trajectory.y, trajectory.theta
    else:
        x, y, theta = trajectory.interpolate(curve.s)
    tr = polar(curve)
    return {
        "s": curve.s, "x": x, "y": y, "theta": theta,
        "px": curve.points.real, "py": curve.points.imag,
        "r": tr.r, "phi": tr.phi,
    }


def write_csv(fp: TextIO, table: dict[str, np.ndarray], config: dict) -> None:
    fp.write(f"# schema={SCHEMA}\n")
    for key in sorted(config):
        fp.write(f"# {key}={config[key]}\n")
    cols = [np.asarray(table[c]) for c in CSV_COLUMNS]
    fp.write(",".join(CSV_COLUMNS) + "\n")
    for row in zip(*cols):
        fp.write(",".join(_f17(v) for v in row) + "\n")


def json_payload(kind: str, config: dict, **data) -> dict:
    return {"schema": SCHEMA, "kind": kind, "config": config, **data}


def write_json(fp: TextIO, payload: dict) -> None:
    json.dump(payload, fp, indent=2, sort_keys=True, default=_json_default)
    fp.write("\n")


def _json_default(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


def write_svg(fp: TextIO, polylines: list[np.ndarray], config: dict,
              timestamp: bool = True, size: int = 720) -> None:
    """Polyline SVG of one or more complex point arrays.

    The viewBox is fitted to the joint bounding box with a 5% margin and
    the stroke width scales with the bounding box diagonal.  ``timestamp``
    adds a generation time attribute; suppress it for byte-identical
    output.
    """
    all_pts = np.concatenate([np.asarray(p) for p in polylines])
    xmin, xmax = float(all_pts.real.min()), float(all_pts.real.max())
    ymin, ymax = float(all_pts.imag.min()), float(all_pts.imag.max())
    w, h = xmax - xmin, ymax - ymin
    pad = 0.05 * max(w, h, 1e-12)
    xmin -= pad; ymin -= pad; w += 2 * pad; h += 2 * pad
    stroke = 0.002 * math.hypot(w, h)
    stamp = ""
    if timestamp:
        stamp = (' data-generated="'
                 + datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ") + '"')
    meta = json.dumps({"schema": SCHEMA, "config": config}, sort_keys=True,
                      default=_json_default)
    fp.write(f'<svg xmlns="http://www.w3.org/2000/svg" '
             f'width="{size}" height="{size}" '
             f'viewBox="{_f17(xmin)} {_f17(-ymin - h)} {_f17(w)} {_f17(h)}"'
             f'{stamp}>\n')
    fp.write(f"<metadata>{meta}</metadata>\n")
    colors = ("#1f3b73", "#a3382b", "#2b7a3f", "#7a5c2b", "#5c2b7a", "#2b6b7a")
    for i, pts in enumerate(polylines):
        pts = np.asarray(pts)
        coords = " ".join(f"{pt.real:.8g},{-pt.imag:.8g}" for pt in pts)
        fp.write(f'<polyline fill="none" stroke="{colors[i % len(colors)]}" '
                 f'stroke-width="{stroke:.8g}" points="{coords}"/>\n')
    fp.write("</svg>\n")
