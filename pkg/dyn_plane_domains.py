"""
dyn_plane_domains.py

Constructive planar geometry for the regions of the covering construction.

A PlanarDomain is an open base region (disk, annulus centred at 0, or annular
sector) minus closed disks minus thickened slit polylines. Membership and
distance to the complement are computed analytically on numpy arrays; oriented
boundary contours for winding integration are extracted with shapely.

Main Classes:
- Disk, Annulus, AnnularSector: Base regions.
- PlanarDomain: Base minus removed disks and slits.
- Contour: Closed oriented polyline (+1 counterclockwise outer boundary, -1 hole).

Main Functions:
- build_AR, build_DR, build_CR: The annulus A_R, the sector D_R and the sector C_R.
- contains, boundary_distance, boundary_contour: Module-level wrappers.
- build_case1_domain: Simply connected domain in D_R around a near-omitted value.
- build_case2_domain: Simply connected slit annulus avoiding a list of points.
- distance_to_base: Euclidean distance from a point to a closed base region.

Dependencies:
- numpy: Vectorised membership and distances.
- shapely: Polygon differences, orientation and segmentisation of boundaries.

Usage:
    D = build_DR(9.0, 0.0)
    contours = boundary_contour(D, 0.05)

Author: Dynamics Toolkit Team
Last updated: 2026-10-18
"""

from __future__ import annotations

import math
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import shapely
from shapely.geometry import LineString, Point, Polygon
from shapely.geometry.polygon import orient
from shapely.ops import substring, unary_union

from dyn_settings import SLIT_HALFWIDTH_FACTOR
from utils.errors import DegenerateDomain, NotSimplyConnected, PreconditionViolated, SeparationViolated, WitnessTooClose

TWO_PI = 2.0 * np.pi
DR_HALF_ANGLE = 3.0 * np.pi / 4.0
CR_HALF_ANGLE = 2.0 * np.pi / 3.0
CHUNK = 65536


def _wrap(angle):
    """Wraps angles to (-pi, pi]."""
    return np.angle(np.exp(1j * np.asarray(angle, dtype=float)))


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float
    kind = "disk"

    def to_dict(self):
        return {"type": self.kind, "center": [self.center.real, self.center.imag], "radius": self.radius}


@dataclass(frozen=True)
class Annulus:
    r_in: float
    r_out: float
    kind = "annulus"

    def to_dict(self):
        return {"type": self.kind, "r_in": self.r_in, "r_out": self.r_out}


@dataclass(frozen=True)
class AnnularSector:
    r_in: float
    r_out: float
    theta_center: float
    half_angle: float
    kind = "sector"

    def to_dict(self):
        return {"type": self.kind, "r_in": self.r_in, "r_out": self.r_out,
                "theta_center": self.theta_center, "half_angle": self.half_angle}


Base = Union[Disk, Annulus, AnnularSector]


def _check_base(base: Base) -> None:
    if isinstance(base, Disk):
        if base.radius <= 0:
            raise ValueError("disk radius must be positive")
    elif isinstance(base, (Annulus, AnnularSector)):
        if not 0 <= base.r_in < base.r_out:
            raise ValueError(f"need 0 <= r_in < r_out, got {base.r_in}, {base.r_out}")
        if isinstance(base, AnnularSector) and not 0 < base.half_angle < np.pi:
            raise ValueError(f"half_angle must lie in (0, pi), got {base.half_angle}")
    else:
        raise TypeError(f"unsupported base region {base!r}")


def _segment_distance(z: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from points z (n,) to segments a->b (m,), minimised over segments."""
    ab = b - a
    length2 = np.maximum(np.abs(ab) ** 2, 1e-300)
    out = np.empty(z.shape, dtype=float)
    for start in range(0, z.size, CHUNK):
        zc = z[start:start + CHUNK, None]
        t = np.clip(np.real((zc - a) * np.conj(ab)) / length2, 0.0, 1.0)
        out[start:start + CHUNK] = np.min(np.abs(zc - (a + t * ab)), axis=1)
    return out


def polyline_distance(z, polyline: Sequence[complex]) -> np.ndarray:
    """Euclidean distance from points to a polyline."""
    z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    pts = np.asarray(polyline, dtype=complex)
    if pts.size == 1:
        return np.abs(z - pts[0])
    return _segment_distance(z, pts[:-1], pts[1:])


def _ray_distance(z: np.ndarray, phi: float) -> np.ndarray:
    w = z * np.exp(-1j * phi)
    return np.where(w.real > 0, np.abs(w.imag), np.abs(z))


def _base_contains(base: Base, z: np.ndarray) -> np.ndarray:
    if isinstance(base, Disk):
        return np.abs(z - base.center) < base.radius
    r = np.abs(z)
    inside = (r > base.r_in) & (r < base.r_out)
    if isinstance(base, AnnularSector):
        inside &= np.abs(_wrap(np.angle(z) - base.theta_center)) < base.half_angle
    return inside


def _base_depth(base: Base, z: np.ndarray) -> np.ndarray:
    """Distance to the complement of the base, valid for points inside the base."""
    if isinstance(base, Disk):
        return base.radius - np.abs(z - base.center)
    r = np.abs(z)
    depth = np.minimum(r - base.r_in, base.r_out - r)
    if isinstance(base, AnnularSector):
        for phi in (base.theta_center - base.half_angle, base.theta_center + base.half_angle):
            depth = np.minimum(depth, _ray_distance(z, phi))
    return depth


def _arc_distance(z: np.ndarray, radius: float, theta_center: float, half_angle: float) -> np.ndarray:
    within = np.abs(_wrap(np.angle(z) - theta_center)) <= half_angle
    ends = radius * np.exp(1j * np.array([theta_center - half_angle, theta_center + half_angle]))
    end_distance = np.min(np.abs(z[:, None] - ends[None, :]), axis=1)
    return np.where(within, np.abs(np.abs(z) - radius), end_distance)


def distance_to_base(z, base: Base) -> np.ndarray:
    """Distance from points to the closed base region (0 inside)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    if isinstance(base, Disk):
        return np.maximum(np.abs(z - base.center) - base.radius, 0.0)
    r = np.abs(z)
    if isinstance(base, Annulus):
        return np.maximum(np.maximum(base.r_in - r, r - base.r_out), 0.0)
    closed_inside = (r >= base.r_in) & (r <= base.r_out) & (np.abs(_wrap(np.angle(z) - base.theta_center)) <= base.half_angle)
    d = np.minimum(_arc_distance(z, base.r_in, base.theta_center, base.half_angle),
                   _arc_distance(z, base.r_out, base.theta_center, base.half_angle))
    for phi in (base.theta_center - base.half_angle, base.theta_center + base.half_angle):
        edge = np.array([base.r_in * np.exp(1j * phi)]), np.array([base.r_out * np.exp(1j * phi)])
        d = np.minimum(d, _segment_distance(z, *edge))
    return np.where(closed_inside, 0.0, d)


@dataclass
class Contour:
    """Closed oriented polyline; the closing edge from the last point to the first is implicit."""

    points: np.ndarray
    orientation: int

    def edge_lengths(self) -> np.ndarray:
        return np.abs(np.roll(self.points, -1) - self.points)

    def length(self) -> float:
        return float(np.sum(self.edge_lengths()))

    def to_rows(self) -> List[Tuple[float, float]]:
        return [(float(p.real), float(p.imag)) for p in self.points]


@dataclass
class PlanarDomain:
    """Open base region minus closed disks minus closed thickened slits."""

    base: Base
    removed_disks: List[Tuple[complex, float]] = field(default_factory=list)
    slits: List[np.ndarray] = field(default_factory=list)
    slit_halfwidth: float = 0.0
    simply_connected_flag: bool = False
    domain_id: str = "domain"
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        _check_base(self.base)
        self.removed_disks = [(complex(c), float(r)) for c, r in self.removed_disks]
        self.slits = [np.asarray(s, dtype=complex) for s in self.slits]
        if self.slits and self.slit_halfwidth <= 0:
            self.slit_halfwidth = SLIT_HALFWIDTH_FACTOR * self.scale()

    # --- geometry ---
    def scale(self) -> float:
        if isinstance(self.base, Disk):
            return self.base.radius
        return self.base.r_out

    def bounding_box(self) -> Tuple[float, float, float, float]:
        if isinstance(self.base, Disk):
            c, r = self.base.center, self.base.radius
            return c.real - r, c.real + r, c.imag - r, c.imag + r
        r = self.base.r_out
        return -r, r, -r, r

    def contains(self, z) -> Any:
        arr = np.asarray(z, dtype=complex)
        flat = np.atleast_1d(arr).ravel()
        inside = _base_contains(self.base, flat)
        for center, radius in self.removed_disks:
            inside &= np.abs(flat - center) > radius
        for slit in self.slits:
            candidates = np.flatnonzero(inside)
            if candidates.size:
                inside[candidates] &= polyline_distance(flat[candidates], slit) > self.slit_halfwidth
        if arr.ndim == 0:
            return bool(inside[0])
        return inside.reshape(arr.shape)

    def boundary_distance(self, z) -> Any:
        """Distance from z to the complement of the domain (the boundary distance for members, 0 otherwise)."""
        arr = np.asarray(z, dtype=complex)
        flat = np.atleast_1d(arr).ravel()
        inside = self.contains(flat)
        dist = np.zeros(flat.shape, dtype=float)
        idx = np.flatnonzero(inside)
        if idx.size:
            pts = flat[idx]
            d = _base_depth(self.base, pts)
            for center, radius in self.removed_disks:
                d = np.minimum(d, np.abs(pts - center) - radius)
            for slit in self.slits:
                d = np.minimum(d, polyline_distance(pts, slit) - self.slit_halfwidth)
            dist[idx] = np.maximum(d, 0.0)
        if arr.ndim == 0:
            return float(dist[0])
        return dist.reshape(arr.shape)

    def with_removed_disk(self, center: complex, radius: float, domain_id: Optional[str] = None) -> "PlanarDomain":
        """Copy with one more closed disk removed; the copy makes no simple-connectivity claim."""
        return PlanarDomain(self.base, self.removed_disks + [(complex(center), float(radius))], list(self.slits),
                            self.slit_halfwidth, False, domain_id or f"{self.domain_id}-disk", dict(self.meta))

    # --- contours ---
    def to_polygon(self, max_edge_length: float):
        """Shapely polygon (or multipolygon) approximating the domain with vertices on the exact boundary pieces."""
        if max_edge_length <= 0:
            raise ValueError("max_edge_length must be positive")
        region = _base_polygon(self.base, max_edge_length)
        removed = [Polygon(_circle_ring(c, r, max_edge_length)) for c, r in self.removed_disks]
        removed += [LineString(_to_xy(s)).buffer(self.slit_halfwidth, quad_segs=2) if len(s) > 1
                    else Point(s[0].real, s[0].imag).buffer(self.slit_halfwidth, quad_segs=2) for s in self.slits]
        if removed:
            region = region.difference(unary_union(removed))
        return region

    def boundary_contour(self, max_edge_length: float) -> List[Contour]:
        geometry = self.to_polygon(max_edge_length)
        if geometry.is_empty or geometry.area <= 0:
            raise DegenerateDomain(f"domain {self.domain_id} is empty at slit half-width {self.slit_halfwidth:.3g}",
                                   {"domain_id": self.domain_id})
        geometry = shapely.segmentize(geometry, max_edge_length)
        parts = list(geometry.geoms) if hasattr(geometry, "geoms") else [geometry]
        contours: List[Contour] = []
        for part in sorted((p for p in parts if p.geom_type == "Polygon" and p.area > 0), key=lambda p: -p.area):
            part = orient(part, 1.0)
            contours.append(Contour(_ring_points(part.exterior), +1))
            for interior in part.interiors:
                contours.append(Contour(_ring_points(interior), -1))
        if self.simply_connected_flag and len(contours) != 1:
            raise NotSimplyConnected(f"domain {self.domain_id} is flagged simply connected but has {len(contours)} contours",
                                     {"domain_id": self.domain_id, "contours": len(contours)})
        return contours

    def component_count(self, max_edge_length: float) -> Tuple[int, int]:
        """(number of connected parts, number of boundary contours) of the polygonal domain."""
        geometry = self.to_polygon(max_edge_length)
        if geometry.is_empty:
            return 0, 0
        parts = list(geometry.geoms) if hasattr(geometry, "geoms") else [geometry]
        parts = [p for p in parts if p.geom_type == "Polygon" and p.area > 0]
        return len(parts), sum(1 + len(p.interiors) for p in parts)

    def is_simply_connected(self, max_edge_length: Optional[float] = None) -> bool:
        if self.simply_connected_flag:
            return True
        edge = max_edge_length or self.scale() / 32.0
        return self.component_count(edge) == (1, 1)

    # --- serialisation ---
    def to_dict(self) -> Dict[str, Any]:
        return {
            "domain_id": self.domain_id,
            "base": self.base.to_dict(),
            "removed_disks": [{"center": [c.real, c.imag], "radius": r} for c, r in self.removed_disks],
            "slits": [[[p.real, p.imag] for p in s] for s in self.slits],
            "slit_halfwidth": self.slit_halfwidth,
            "simply_connected": self.simply_connected_flag,
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PlanarDomain":
        raw = data["base"]
        kind = raw["type"]
        if kind == "disk":
            base: Base = Disk(complex(*raw["center"]), float(raw["radius"]))
        elif kind == "annulus":
            base = Annulus(float(raw["r_in"]), float(raw["r_out"]))
        elif kind == "sector":
            base = AnnularSector(float(raw["r_in"]), float(raw["r_out"]), float(raw["theta_center"]), float(raw["half_angle"]))
        else:
            raise ValueError(f"unknown base type {kind}")
        return cls(base,
                   [(complex(*d["center"]), float(d["radius"])) for d in data.get("removed_disks", [])],
                   [np.array([complex(*p) for p in s]) for s in data.get("slits", [])],
                   float(data.get("slit_halfwidth", 0.0)),
                   bool(data.get("simply_connected", False)),
                   data.get("domain_id", "domain"),
                   dict(data.get("meta", {})))


def _to_xy(points: np.ndarray) -> np.ndarray:
    return np.column_stack([points.real, points.imag])


def _ring_points(ring) -> np.ndarray:
    xy = np.asarray(ring.coords)[:-1]
    pts = xy[:, 0] + 1j * xy[:, 1]
    keep = np.abs(pts - np.roll(pts, 1)) > 0
    return pts[keep]


def _arc_points(radius: float, start: float, stop: float, max_edge_length: float) -> np.ndarray:
    n = max(int(math.ceil(abs(stop - start) * radius / max_edge_length)), 8)
    return radius * np.exp(1j * np.linspace(start, stop, n + 1))


def _circle_ring(center: complex, radius: float, max_edge_length: float) -> np.ndarray:
    n = max(int(math.ceil(TWO_PI * radius / max_edge_length)), 16)
    pts = center + radius * np.exp(1j * TWO_PI * np.arange(n) / n)
    return _to_xy(pts)


def _base_polygon(base: Base, max_edge_length: float) -> Polygon:
    if isinstance(base, Disk):
        return Polygon(_circle_ring(base.center, base.radius, max_edge_length))
    if isinstance(base, Annulus):
        outer = _circle_ring(0j, base.r_out, max_edge_length)
        if base.r_in == 0:
            return Polygon(outer)
        return Polygon(outer, [_circle_ring(0j, base.r_in, max_edge_length)[::-1]])
    lo, hi = base.theta_center - base.half_angle, base.theta_center + base.half_angle
    outer_arc = _arc_points(base.r_out, lo, hi, max_edge_length)
    inner_arc = _arc_points(base.r_in, hi, lo, max_edge_length) if base.r_in > 0 else np.array([0j])
    return Polygon(_to_xy(np.concatenate([outer_arc, inner_arc])))


# --- module-level wrappers ---

def contains(domain: PlanarDomain, z):
    return domain.contains(z)


def boundary_distance(domain: PlanarDomain, z):
    return domain.boundary_distance(z)


def boundary_contour(domain: PlanarDomain, max_edge_length: float) -> List[Contour]:
    return domain.boundary_contour(max_edge_length)


# --- the regions A_R, D_R, C_R ---

def _check_R(R: float) -> None:
    if R <= 1:
        raise PreconditionViolated(f"regions are defined for R > 1, got {R}", {"R": R})


def build_AR(R: float) -> PlanarDomain:
    _check_R(R)
    return PlanarDomain(Annulus(R / 2.0, 2.0 * R), domain_id=f"A_R[R={R:g}]")


def build_DR(R: float, theta: float, half_angle: float = DR_HALF_ANGLE) -> PlanarDomain:
    _check_R(R)
    return PlanarDomain(AnnularSector(R / 2.0 + 1.0 / 9.0, 2.0 * R - 1.0 / 9.0, float(theta), half_angle),
                        simply_connected_flag=True, domain_id=f"D_R[R={R:g},theta={theta:.4f}]")


def build_CR(R: float, theta: float) -> PlanarDomain:
    _check_R(R)
    return PlanarDomain(AnnularSector(2.0 * R / 3.0, 3.0 * R / 2.0, float(theta), CR_HALF_ANGLE),
                        simply_connected_flag=True, domain_id=f"C_R[R={R:g},theta={theta:.4f}]")


def build_tubular_CR(R: float, theta: float) -> PlanarDomain:
    """Annular sector containing C_R and contained in its R/20 neighbourhood."""
    _check_R(R)
    return PlanarDomain(AnnularSector(2.0 * R / 3.0 - R / 40.0, 3.0 * R / 2.0 + R / 40.0, float(theta), CR_HALF_ANGLE + 1.0 / 61.0),
                        simply_connected_flag=True, domain_id=f"N(C_R)[R={R:g},theta={theta:.4f}]")


# --- first-case construction ---

def _case1_arcs(alpha: complex, sector: AnnularSector, R: float) -> List[Tuple[str, np.ndarray]]:
    """The four arcs from alpha to the boundary of D_R, extended slightly past it."""
    ext = R / 50.0
    rho, phi = abs(alpha), float(np.angle(alpha))
    unit = np.exp(1j * phi)
    step = R / 100.0
    ccw = float(_wrap(sector.theta_center + sector.half_angle - phi)) % TWO_PI + ext / rho
    cw = float(_wrap(phi - (sector.theta_center - sector.half_angle))) % TWO_PI + ext / rho
    return [
        ("radial-out", np.array([alpha, unit * (sector.r_out + ext)])),
        ("radial-in", np.array([alpha, unit * max(sector.r_in - ext, sector.r_in / 2.0)])),
        ("circular-ccw", rho * np.exp(1j * np.linspace(phi, phi + ccw, max(int(ccw * rho / step), 2) + 1))),
        ("circular-cw", rho * np.exp(1j * np.linspace(phi, phi - cw, max(int(cw * rho / step), 2) + 1))),
    ]


def build_case1_domain(alpha: complex, R: float, z1: complex, z2: complex, theta: float = 0.0,
                       half_angle: float = DR_HALF_ANGLE, slit_halfwidth: Optional[float] = None) -> PlanarDomain:
    """Simply connected D inside D_R minus a neighbourhood of alpha containing z1 and z2.

    Cases: (i) D_R itself when Delta(alpha, R/20) misses D_R; (ii) a sector between
    C_R and its R/20 neighbourhood when Delta(alpha, R/20) misses C_R; (iii) D_R
    minus Delta(alpha, R/20) and one arc from alpha to the boundary, the first of
    radial-out, radial-in, circular-ccw, circular-cw that keeps z1 and z2 inside.
    """
    alpha, z1, z2 = complex(alpha), complex(z1), complex(z2)
    d_r = build_DR(R, theta, half_angle)
    c_r = build_CR(R, theta)
    for name, z in (("z1", z1), ("z2", z2)):
        if not c_r.contains(z):
            raise WitnessTooClose(f"{name} = {z} is not in C_R", {"point": [z.real, z.imag], "R": R})
        if abs(z - alpha) < R / 20.0:
            raise WitnessTooClose(f"{name} lies within R/20 of alpha", {"distance": abs(z - alpha), "R": R})

    if float(distance_to_base(alpha, d_r.base)[0]) >= R / 20.0:
        domain = d_r
        domain.meta = {"case": "i"}
        return domain
    if float(distance_to_base(alpha, c_r.base)[0]) >= R / 20.0:
        domain = build_tubular_CR(R, theta)
        domain.meta = {"case": "ii"}
        return domain

    hw = slit_halfwidth or SLIT_HALFWIDTH_FACTOR * R
    clearance = R / 100.0
    for name, arc in _case1_arcs(alpha, d_r.base, R):
        if float(np.min(polyline_distance(np.array([z1, z2]), arc))) <= clearance:
            continue
        candidate = PlanarDomain(d_r.base, [(alpha, R / 20.0)], [arc], hw, True,
                                 f"case1[R={R:g},arc={name}]", {"case": "iii", "arc": name})
        if not np.all(candidate.contains(np.array([z1, z2]))):
            continue
        if candidate.component_count(R / 16.0) == (1, 1):
            logging.debug(f"case-1 domain at R={R:g} uses arc {name}")
            return candidate
    raise DegenerateDomain("no arc from alpha keeps the witnesses in one simply connected piece",
                           {"alpha": [alpha.real, alpha.imag], "R": R})


# --- second-case construction ---

def _route(point: complex, target_radius: float, forbidden: Sequence[complex], clearance: float,
           max_detour: float = np.pi / 2.0) -> List[Tuple[int, np.ndarray]]:
    """Candidate paths from `point` to the circle |z| = target_radius.

    The pure radial interval comes first, then circular-then-radial detours of
    increasing angle, counterclockwise before clockwise. Each entry is
    (detour sign, polyline); only paths keeping `clearance` from every forbidden
    point are returned.
    """
    rho, phi = abs(point), float(np.angle(point))
    step = clearance / max(rho, 1e-300)
    forbidden = np.asarray(forbidden, dtype=complex)
    options: List[Tuple[int, np.ndarray]] = []
    angles = np.arange(1, int(max_detour / step) + 1) * step
    for sign, detours in ((0, [0.0]), (+1, angles), (-1, angles)):
        for detour in detours:
            end_angle = phi + sign * detour
            if sign == 0:
                path = np.array([point, target_radius * np.exp(1j * phi)])
            else:
                n_arc = max(int(detour / step), 1)
                arc = rho * np.exp(1j * np.linspace(phi, end_angle, n_arc + 1))
                path = np.concatenate([arc, [target_radius * np.exp(1j * end_angle)]])
            if forbidden.size == 0 or float(np.min(polyline_distance(forbidden, path))) >= clearance:
                options.append((sign, path))
                break
    return options


def _truncate_at_contact(path: np.ndarray, obstacles, stub: float) -> np.ndarray:
    """Cuts a path just past its first contact with already removed material."""
    if obstacles is None or obstacles.is_empty:
        return path
    line = LineString(_to_xy(path))
    hit = line.intersection(obstacles)
    if hit.is_empty:
        return path
    coords = []
    for geom in getattr(hit, "geoms", [hit]):
        coords.extend(geom.coords if geom.geom_type != "Polygon" else geom.exterior.coords)
    s = min(line.project(Point(c)) for c in coords)
    cut = substring(line, 0.0, min(s + stub, line.length))
    xy = np.asarray(cut.coords)
    return xy[:, 0] + 1j * xy[:, 1]


def build_case2_domain(alpha: complex, avoided: Sequence[complex], eps: float, R: float, jexp: float,
                       z1: complex, z2: complex, slit_halfwidth: Optional[float] = None) -> PlanarDomain:
    """Simply connected domain in A_R containing z1, z2, avoiding `avoided` and Delta(alpha, R^(-jexp/2)).

    A full cut through alpha joins both boundary circles (each half radial or
    circular-then-radial); every avoided point then gets a path towards the
    nearer boundary circle that stops at its first contact with removed material.
    Paths keep eps*R/4 away from z1 and z2.
    """
    alpha, z1, z2 = complex(alpha), complex(z1), complex(z2)
    r_lo, r_hi = R / 2.0 + eps * R, 2.0 * R - eps * R
    tol = 1e-9 * R
    for name, z in (("alpha", alpha), ("z1", z1), ("z2", z2)):
        if not r_lo - tol <= abs(z) <= r_hi + tol:
            raise SeparationViolated(f"{name} is outside the closed annulus A_R(eps)",
                                     {"point": [z.real, z.imag], "R": R, "eps": eps})
    avoided = [complex(x) for x in avoided]
    for x in [alpha] + avoided:
        for z in (z1, z2):
            if abs(x - z) < eps * R - tol:
                raise SeparationViolated("avoided point closer than eps*R to a witness",
                                         {"point": [x.real, x.imag], "witness": [z.real, z.imag], "R": R, "eps": eps})

    hw = slit_halfwidth or SLIT_HALFWIDTH_FACTOR * R
    clearance = eps * R / 4.0
    ext = R / 50.0
    inner, outer = R / 2.0 - ext, 2.0 * R + ext
    witnesses = [z1, z2]

    def nearer_first(x: complex) -> Tuple[float, float]:
        return (inner, outer) if abs(x) - R / 2.0 <= 2.0 * R - abs(x) else (outer, inner)

    first, second = nearer_first(alpha)
    half_a = _route(alpha, first, witnesses, clearance)
    half_b = _route(alpha, second, witnesses, clearance)
    cut = None
    for sign_a, path_a in half_a:
        for sign_b, path_b in half_b:
            if sign_a != 0 and sign_a == sign_b:
                continue
            meet = LineString(_to_xy(path_a)).intersection(LineString(_to_xy(path_b)))
            if meet.geom_type == "Point" and abs(complex(meet.x, meet.y) - alpha) <= 1e-9 * R:
                cut = (path_a, path_b)
                break
        if cut:
            break
    if cut is None:
        raise DegenerateDomain("no cut through alpha keeps clear of the witnesses", {"R": R, "eps": eps})

    excluded_radius = R ** (-jexp / 2.0)
    slits = [cut[0], cut[1]]
    routes = [{"point": "alpha", "kind": "cut"}]
    for index, x in enumerate(avoided):
        if not R / 2.0 < abs(x) < 2.0 * R:
            continue
        obstacles = unary_union([LineString(_to_xy(s)).buffer(hw, quad_segs=2) for s in slits]
                                + [Point(alpha.real, alpha.imag).buffer(excluded_radius, quad_segs=4)])
        if obstacles.contains(Point(x.real, x.imag)):
            routes.append({"point": index, "kind": "already removed"})
            continue
        options = _route(x, nearer_first(x)[0], witnesses, clearance) or _route(x, nearer_first(x)[1], witnesses, clearance)
        if not options:
            raise DegenerateDomain(f"no clear path from avoided point {index} to the boundary", {"R": R})
        path = _truncate_at_contact(options[0][1], obstacles, 3.0 * hw)
        slits.append(path)
        routes.append({"point": index, "kind": "radial" if options[0][0] == 0 else "detour"})

    domain = PlanarDomain(Annulus(R / 2.0, 2.0 * R), [(alpha, excluded_radius)], slits, hw, True,
                          f"case2[R={R:g},l={len(avoided)}]", {"eps": eps, "routes": routes})
    if not np.all(domain.contains(np.array([z1, z2]))):
        raise SeparationViolated("witnesses fell on a removed path", {"R": R})
    if domain.component_count(R / 16.0) != (1, 1):
        raise DegenerateDomain("slit annulus is not simply connected", {"R": R, "routes": routes})
    return domain
