"""
dyn_report_utils.py

Artifact writers for the command-line runs.

Structured results go to JSON, tables to CSV and figures to SVG. Every artifact
carries the SHA-256 hash of the canonical run configuration and the toolkit
version: JSON under a "meta" key, CSV in a leading comment line, SVG in a
<metadata> element. JSON and CSV output contains no timestamps, so identical
configurations give byte-identical files.

Main Functions:
- canonical_json, config_hash, artifact_meta
- save_json, save_csv
- render_domain_svg, render_heatmap_svg, render_curve_svg, save_svg

Dependencies:
- jinja2: SVG templates.
- numpy

Author: Dynamics Toolkit Team
Last updated: 2026-10-18
"""

import os
import csv
import json
import hashlib
import logging
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from jinja2 import Environment

from dyn_settings import TOOLKIT_VERSION
from dyn_plane_domains import PlanarDomain
from dyn_winding import CoveringGridReport
from app.trace_utils import to_jsonable

SVG_SIZE = 640
SVG_MARGIN = 24

_env = Environment(autoescape=True, trim_blocks=True, lstrip_blocks=True)

DOMAIN_TEMPLATE = _env.from_string("""<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{{ size }}" height="{{ size }}" viewBox="0 0 {{ size }} {{ size }}">
  <metadata>{{ meta }}</metadata>
  <title>{{ title }}</title>
  <rect width="100%" height="100%" fill="#ffffff"/>
  {% for contour in contours %}
  <polygon points="{{ contour.points }}" fill="{{ '#cfe3f7' if contour.orientation > 0 else '#ffffff' }}" stroke="#1f4e79" stroke-width="1"/>
  {% endfor %}
  {% for marker in markers %}
  <circle cx="{{ marker.x }}" cy="{{ marker.y }}" r="4" fill="{{ marker.color }}"><title>{{ marker.label }}</title></circle>
  {% endfor %}
  <text x="{{ margin }}" y="{{ margin - 6 }}" font-family="monospace" font-size="12">{{ title }}</text>
</svg>
""")

HEATMAP_TEMPLATE = _env.from_string("""<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{{ size }}" height="{{ size }}" viewBox="0 0 {{ size }} {{ size }}">
  <metadata>{{ meta }}</metadata>
  <title>{{ title }}</title>
  <rect width="100%" height="100%" fill="#ffffff"/>
  {% for cell in cells %}
  <rect x="{{ cell.x }}" y="{{ cell.y }}" width="{{ cell.w }}" height="{{ cell.w }}" fill="{{ cell.color }}"><title>{{ cell.label }}</title></rect>
  {% endfor %}
  <text x="{{ margin }}" y="{{ margin - 6 }}" font-family="monospace" font-size="12">{{ title }}</text>
</svg>
""")

CURVE_TEMPLATE = _env.from_string("""<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{{ size }}" height="{{ size }}" viewBox="0 0 {{ size }} {{ size }}">
  <metadata>{{ meta }}</metadata>
  <title>{{ title }}</title>
  <rect width="100%" height="100%" fill="#ffffff"/>
  <line x1="{{ margin }}" y1="{{ size - margin }}" x2="{{ size - margin }}" y2="{{ size - margin }}" stroke="#000000"/>
  <line x1="{{ margin }}" y1="{{ margin }}" x2="{{ margin }}" y2="{{ size - margin }}" stroke="#000000"/>
  {% if reference is not none %}
  <line x1="{{ margin }}" y1="{{ reference }}" x2="{{ size - margin }}" y2="{{ reference }}" stroke="#999999" stroke-dasharray="4 4"/>
  {% endif %}
  <polyline points="{{ points }}" fill="none" stroke="#c0392b" stroke-width="2"/>
  <text x="{{ margin }}" y="{{ margin - 6 }}" font-family="monospace" font-size="12">{{ title }}</text>
</svg>
""")


def canonical_json(value: Any) -> str:
    return json.dumps(to_jsonable(value), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def config_hash(config: Dict[str, Any]) -> str:
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()


def artifact_meta(config: Dict[str, Any]) -> Dict[str, str]:
    return {"config_hash": config_hash(config), "toolkit_version": TOOLKIT_VERSION}


def _prepare(path: str) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)


def save_json(path: str, payload: Dict[str, Any], meta: Dict[str, str]) -> str:
    _prepare(path)
    data = dict(to_jsonable(payload))
    data["meta"] = meta
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")
    logging.info(f"wrote {path}")
    return path


def save_csv(path: str, rows: Sequence[Sequence[Any]], meta: Dict[str, str]) -> str:
    """Writes rows (header first) after a '# config_hash=... toolkit_version=...' line."""
    _prepare(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# config_hash={meta['config_hash']} toolkit_version={meta['toolkit_version']}\n")
        writer = csv.writer(f, lineterminator="\n")
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    logging.info(f"wrote {path}")
    return path


def save_svg(path: str, svg: str) -> str:
    _prepare(path)
    with open(path, "w", encoding="utf-8") as f:
        f.write(svg)
    logging.info(f"wrote {path}")
    return path


class _Frame:
    """Maps a plane box onto the square canvas with y pointing up."""

    def __init__(self, xmin: float, xmax: float, ymin: float, ymax: float, size: int = SVG_SIZE,
                 margin: int = SVG_MARGIN):
        span = max(xmax - xmin, ymax - ymin) or 1.0
        self.xmin, self.ymax = xmin, ymax
        self.scale = (size - 2 * margin) / span
        self.margin = margin

    def x(self, value: float) -> float:
        return round(self.margin + (value - self.xmin) * self.scale, 3)

    def y(self, value: float) -> float:
        return round(self.margin + (self.ymax - value) * self.scale, 3)

    def points(self, z: np.ndarray) -> str:
        return " ".join(f"{self.x(p.real)},{self.y(p.imag)}" for p in z)


def render_domain_svg(domain: PlanarDomain, meta: Dict[str, str], markers: Optional[Dict[str, complex]] = None,
                      max_edge_length: Optional[float] = None) -> str:
    """Boundary contours of a domain (holes drawn white) with labelled marker points."""
    contours = domain.boundary_contour(max_edge_length or domain.scale() / 128.0)
    frame = _Frame(*domain.bounding_box())
    palette = ["#c0392b", "#27ae60", "#8e44ad", "#d35400"]
    marks = [{"x": frame.x(z.real), "y": frame.y(z.imag), "label": label, "color": palette[i % len(palette)]}
             for i, (label, z) in enumerate(sorted((markers or {}).items()))]
    return DOMAIN_TEMPLATE.render(size=SVG_SIZE, margin=SVG_MARGIN, meta=canonical_json(meta), title=domain.domain_id,
                                  contours=[{"points": frame.points(c.points), "orientation": c.orientation}
                                            for c in contours],
                                  markers=marks)


def _count_color(count: int, N: int, top: int) -> str:
    if count < 0:
        return "#bdbdbd"
    if count < N:
        return "#e74c3c"
    shade = int(200 - 140 * (count - N) / max(top - N, 1))
    return f"#30{shade:02x}50"


def render_heatmap_svg(report: CoveringGridReport, meta: Dict[str, str]) -> str:
    """Grid preimage counts: red below N, green shades from N upwards, grey when skipped."""
    if report.points.size == 0:
        frame = _Frame(-1.0, 1.0, -1.0, 1.0)
    else:
        frame = _Frame(float(report.points.real.min()) - report.grid_step / 2,
                       float(report.points.real.max()) + report.grid_step / 2,
                       float(report.points.imag.min()) - report.grid_step / 2,
                       float(report.points.imag.max()) + report.grid_step / 2)
    top = int(report.counts.max()) if report.counts.size else report.N
    width = round(report.grid_step * frame.scale, 3)
    cells = [{"x": round(frame.x(p.real) - width / 2, 3), "y": round(frame.y(p.imag) - width / 2, 3), "w": width,
              "color": _count_color(int(n), report.N, top), "label": f"{p:.4g}: {int(n)}"}
             for p, n in zip(report.points, report.counts)]
    title = f"{report.source_id} -> {report.target_id}, N={report.N}, min={report.min_count}"
    return HEATMAP_TEMPLATE.render(size=SVG_SIZE, margin=SVG_MARGIN, meta=canonical_json(meta), title=title,
                                   cells=cells)


def render_curve_svg(curve: Dict[int, float], meta: Dict[str, str], title: str,
                     reference: Optional[float] = None) -> str:
    """Polyline of (1/n) log K against n, with an optional dashed reference level."""
    ns = sorted(curve)
    values: List[float] = [curve[n] for n in ns]
    top = max(values + ([reference] if reference is not None else []) + [1e-9])
    frame = _Frame(float(ns[0]), float(ns[-1]), 0.0, top * 1.1)
    points = " ".join(f"{frame.x(float(n))},{frame.y(v)}" for n, v in zip(ns, values))
    level = frame.y(reference) if reference is not None else None
    return CURVE_TEMPLATE.render(size=SVG_SIZE, margin=SVG_MARGIN, meta=canonical_json(meta), title=title,
                                 points=points, reference=level)
