"""
dyn_covering.py

Search for a bounded domain V with V inside f(V) and every point of V having
at least N preimages in V.

For each radius of a geometric schedule the search locates circle witnesses
w_M (|f| > R^j) and w_m (|f| < 3R), records the dichotomy hypotheses, and scans
the annulus A_R = {R/2 < |z| < 2R} for values missed by f on the sector D_R:

- nothing missed (CoversFully) leads to the second case, split by the sublevel
  set W = A_R intersected with {|f| < 2R}: a circle avoiding W gives a disk
  certificate (IIa); otherwise a long component of W gives a slit annulus (IIb);
- a missed value alpha (OmitsAlpha) leads to the first case: D_R minus a tiny
  disk around alpha when that disk does not return to D_R, otherwise a slit
  domain built around relocated witnesses.

Every certificate is backed by winding counts on a grid of V at two
resolutions. Failures are recorded in the decision trace and the schedule
moves on; running out of radii returns BudgetExhausted. Unless d is configured,
the working d is measured once per search and stored in the certificate
together with the hypothesis report.

Main Classes:
- Witnesses, HypothesisReport, DichotomyOutcome, Escalation
- SublevelComponent, SublevelSet
- CoveringCertificate, BudgetExhausted

Main Functions:
- check_dichotomy_hypotheses, hypothesis_threshold, choose_j
- find_witnesses, run_dichotomy, case1_search
- sublevel_components, annulus_shortcut, case2a_certificate, case2b_certificate, disk_certificate
- find_self_covering_V, default_schedule

Dependencies:
- numpy, scipy (ndimage.label, spatial.ConvexHull)

Author: Dynamics Toolkit Team
Last updated: 2026-10-18
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import ndimage
from scipy.spatial import ConvexHull, QhullError

from dyn_settings import (CIRCLE_SAMPLES, CONTOUR_EDGE_DIVISIONS, DICHOTOMY_GRID_DIVISIONS, HYPOTHESES_MODE, J_MIN,
                          NONRECURRENCE_SAMPLES, R_FACTOR, R_START, R_STEPS, SUBLEVEL_GRID_DIVISIONS, WORKING_D,
                          D_TRIALS, DEFAULT_SEED)
from dyn_function_model import FunctionSpec, max_modulus_on_circle, scan_circle
from dyn_plane_domains import (DR_HALF_ANGLE, Disk, PlanarDomain, build_AR, build_case1_domain, build_case2_domain,
                               build_CR, build_DR, distance_to_base)
from dyn_hyperbolic import (WorkingD, annulus_AN_log, configured_working_d, k_constant_log, measure_working_d,
                            quasihyperbolic_upper)
from dyn_winding import CoveringGridReport, count_preimages, covering_report, locate_preimages, rouche_transfer
from app.trace_utils import TraceLog
from utils.errors import (CertificationFailed, Inconclusive, MarginTooSmall, NotEnoughPreimages, PreconditionViolated,
                          ToolkitError)
from utils.grid_utils import lattice_points

COVERS_FULLY = "CoversFully"
OMITS_ALPHA = "OmitsAlpha"
ESCALATION_WIDENING = math.pi / 8.0
SUBLEVEL_SCAN_RADII = 60
CASE2A_TEST_VALUES = (0.5, 0.5j, -0.5, -0.5j)
NEAR_MAX_FACTOR = 0.9


# --- witnesses and hypotheses ---

@dataclass
class Witnesses:
    R: float
    theta: float
    j: int
    w_M: complex
    w_m: complex
    log_M: float
    log_m: float
    separation: Dict[str, bool] = field(default_factory=dict)

    @property
    def M(self) -> float:
        return _exp(self.log_M)

    @property
    def m(self) -> float:
        return _exp(self.log_m)

    def to_dict(self) -> Dict[str, Any]:
        return {"R": self.R, "theta": self.theta, "j": self.j, "w_M": [self.w_M.real, self.w_M.imag],
                "w_m": [self.w_m.real, self.w_m.imag], "log_M": _finite(self.log_M), "log_m": _finite(self.log_m),
                "separation": self.separation}


@dataclass
class HypothesisReport:
    """Outcome of the three dichotomy inequalities, evaluated with logarithms."""

    passed: bool
    growth_ok: bool
    inner_radius_ok: bool
    k_power_ok: bool
    margins: Dict[str, Optional[float]] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> Dict[str, Any]:
        return {"passed": self.passed, "growth_ok": self.growth_ok, "inner_radius_ok": self.inner_radius_ok,
                "k_power_ok": self.k_power_ok, "margins": self.margins}


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _finite(x: float) -> Optional[float]:
    return float(x) if math.isfinite(x) else None


def check_dichotomy_hypotheses_log(log_m: float, log_M: float, R: float, j: float, N: int, d: float) -> HypothesisReport:
    """Hypotheses of the dichotomy from ln m and ln M.

    With k = k(d): |M - 2R|/k^N > 4R, ((m + 2R)^(e^d)/|M - 2R|)^(1/(e^d - 1)) < R^(-j/2)
    and k^N < R^(j/2).
    """
    return _hypotheses_in_logs(log_m, log_M, math.log(R), j, N, d)


def _hypotheses_in_logs(log_m: float, log_M: float, log_R: float, j: float, N: int, d: float) -> HypothesisReport:
    if not log_m < log_M:
        raise PreconditionViolated("hypotheses need m < M", {"log_m": log_m, "log_M": log_M})
    log_lower, log_upper = annulus_AN_log(log_m, log_M, d, N, math.log(2.0) + log_R)
    growth = log_upper - math.log(4.0) - log_R
    inner = -0.5 * j * log_R - log_lower
    k_power = 0.5 * j * log_R - N * k_constant_log(d)
    report = HypothesisReport(growth > 0 and inner > 0 and k_power > 0, growth > 0, inner > 0, k_power > 0,
                              {"growth": _finite(growth), "inner_radius": _finite(inner), "k_power": _finite(k_power)})
    return report


def check_dichotomy_hypotheses(m: float, M: float, R: float, j: float, N: int, d: float) -> HypothesisReport:
    if m < 0 or M <= 0 or R <= 0:
        raise PreconditionViolated("hypotheses need positive inputs", {"m": m, "M": M, "R": R})
    log_m = math.log(m) if m > 0 else -math.inf
    return check_dichotomy_hypotheses_log(log_m, math.log(M), R, j, N, d)


def hypothesis_threshold(j: float, N: int, d: float, log_R_max: float = 1e6) -> Optional[float]:
    """Smallest ln R from which M = R^j and m = 3R satisfy the hypotheses, or None.

    None means the inequalities fail at log_R_max (for M = R^j that is the case
    whenever e^d >= 3).
    """
    def holds(log_R: float) -> bool:
        log_m = math.log(3.0) + log_R
        if not j * log_R > log_m:
            return False
        return _hypotheses_in_logs(log_m, j * log_R, log_R, j, N, d).passed

    grid = np.geomspace(1e-3, log_R_max, 4000)
    status = np.array([holds(float(x)) for x in grid])
    if not status[-1]:
        return None
    failing = np.flatnonzero(~status)
    if failing.size == 0:
        return float(grid[0])
    lo, hi = float(grid[failing[-1]]), float(grid[failing[-1] + 1])
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if holds(mid) else (mid, hi)
    return hi


def choose_j(spec: FunctionSpec, R: float, N: int, d: Optional[float], mode: str = HYPOTHESES_MODE) -> int:
    """Growth exponent: at least J_MIN and above the degree of polynomial models.

    In strict mode j is also the smallest integer with R^(j/2) > k(d)^N.
    """
    j = J_MIN
    if spec.polynomial_degree is not None:
        j = max(j, spec.polynomial_degree + 1)
    if mode == "strict":
        if d is None:
            raise PreconditionViolated("strict mode needs d before choosing j", {"R": R})
        j = max(j, int(math.floor(2.0 * N * k_constant_log(d) / math.log(R))) + 1)
    return j


def _angular_gap(a: float, b: float) -> float:
    return abs(float(np.angle(np.exp(1j * (a - b)))))


def _find_witnesses(spec: FunctionSpec, R: float, j: int, samples: int = CIRCLE_SAMPLES) -> Tuple[Optional[Witnesses], str]:
    scan = scan_circle(spec, R, samples)
    top = max_modulus_on_circle(spec, R, samples)
    if not top.log_modulus > j * math.log(R):
        return None, "witness |f|>R^j never found"
    small = np.flatnonzero(scan.log_modulus < math.log(3.0 * R))
    if small.size == 0:
        return None, "no point with |f|<3R on the circle"
    phi_M = top.angle
    gaps = np.array([_angular_gap(scan.angles[i], phi_M) for i in small])
    pick = int(small[int(np.argmin(gaps))])
    phi_m = float(scan.angles[pick])
    theta = float(np.angle(np.exp(1j * (phi_M + 0.5 * float(np.angle(np.exp(1j * (phi_m - phi_M))))))))
    w_m = complex(scan.points[pick])

    c_r = build_CR(R, theta)
    clearance = lambda z: float(c_r.boundary_distance(z))
    near_max = np.flatnonzero(scan.log_modulus >= top.log_modulus + math.log(NEAR_MAX_FACTOR))
    clear_max = [complex(scan.points[i]) for i in near_max if clearance(scan.points[i]) >= R / 10.0]
    apart = any(abs(a - b) >= R / 10.0 for a in clear_max for b in clear_max)
    separation = {"two_maxima_apart": bool(apart), "w_m_clear": clearance(w_m) >= R / 10.0}
    witnesses = Witnesses(R, theta, j, complex(top.point), w_m, float(top.log_modulus),
                          float(scan.log_modulus[pick]), separation)
    return witnesses, "found"


def find_witnesses(spec: FunctionSpec, R: float, j: int, samples: int = CIRCLE_SAMPLES) -> Optional[Witnesses]:
    """w_M with |f| > R^j and w_m with |f| < 3R on |z| = R, and theta placing both in C_R; None when absent."""
    if R <= 1:
        raise PreconditionViolated("witnesses need R > 1", {"R": R})
    witnesses, _ = _find_witnesses(spec, R, j, samples)
    return witnesses


# --- dichotomy ---

@dataclass
class DichotomyOutcome:
    R: float
    theta: float
    j: int
    variant: str
    alpha: Optional[complex] = None
    verified_N: Optional[int] = None
    excluded_radius: Optional[float] = None
    scan: Optional[CoveringGridReport] = None
    omission_report: Optional[CoveringGridReport] = None
    skipped: int = 0

    def to_dict(self) -> Dict[str, Any]:
        data = {"R": self.R, "theta": self.theta, "j": self.j, "variant": self.variant, "skipped": self.skipped}
        if self.variant == OMITS_ALPHA:
            data.update({"alpha": [self.alpha.real, self.alpha.imag], "verified_N": self.verified_N,
                         "excluded_radius": self.excluded_radius})
        if self.scan is not None:
            data["scan"] = self.scan.summary()
        return data


def _grid_order_key(z: complex) -> Tuple[float, float]:
    return abs(z), float(np.angle(z)) % (2.0 * np.pi)


def run_dichotomy(spec: FunctionSpec, R: float, theta: float, j: int, N: int, d: float,
                  hypotheses: Optional[HypothesisReport] = None, half_angle: float = DR_HALF_ANGLE,
                  threads: int = 1, mode: str = HYPOTHESES_MODE) -> DichotomyOutcome:
    """Either f(D_R) covers the A_R grid, or a value alpha is missed and the rest of A_R is covered N times."""
    if hypotheses is None:
        raise PreconditionViolated("dichotomy hypotheses were not checked", {"R": R})
    if mode == "strict" and not hypotheses.passed:
        raise PreconditionViolated("dichotomy hypotheses failed in strict mode", hypotheses.to_dict())
    d_r = build_DR(R, theta, half_angle)
    a_r = build_AR(R)
    step = R / DICHOTOMY_GRID_DIVISIONS
    scan = covering_report(spec, d_r, a_r, step, 1, threads)
    if not scan.failing:
        if scan.skipped:
            # a skipped point may be an omitted value
            raise Inconclusive(f"{len(scan.skipped)} A_R grid points were skipped; full covering not established",
                               {"R": R, "skipped": scan.skipped[:50]})
        return DichotomyOutcome(R, theta, j, COVERS_FULLY, scan=scan)

    candidates = [complex(*entry["point"]) for entry in scan.failing]
    alpha = min(candidates, key=_grid_order_key)
    refined = count_preimages(spec, d_r, alpha, max_edge_length=d_r.scale() / (2 * CONTOUR_EDGE_DIVISIONS))
    if refined.count != 0:
        raise Inconclusive("omitted candidate has preimages at refined resolution",
                           {"alpha": [alpha.real, alpha.imag], "count": refined.count})
    excluded = R ** (-0.5 * j)
    target = a_r.with_removed_disk(alpha, excluded, f"A_R-minus-alpha[R={R:g}]")
    report = covering_report(spec, d_r, target, step, N, threads)
    if not report.ok:
        raise Inconclusive(f"{len(report.failing)} grid points of A_R minus Delta(alpha) lack {N} preimages",
                           {"alpha": [alpha.real, alpha.imag], "failing": report.failing[:50],
                            "skipped": len(report.skipped)})
    return DichotomyOutcome(R, theta, j, OMITS_ALPHA, alpha, report.min_count, excluded, scan, report,
                            len(scan.skipped))


# --- certificates ---

@dataclass
class CoveringCertificate:
    V: PlanarDomain
    N: int
    case_tag: str
    R: float
    witnesses: Optional[Witnesses]
    grid_report: CoveringGridReport
    self_inclusion_evidence: CoveringGridReport
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def enclosing_radius(self) -> float:
        """V lies in the disk of this radius."""
        return 2.0 * self.R

    def to_dict(self) -> Dict[str, Any]:
        return {
            "case_tag": self.case_tag,
            "N": self.N,
            "R": self.R,
            "enclosing_radius": self.enclosing_radius,
            "V": self.V.to_dict(),
            "witnesses": self.witnesses.to_dict() if self.witnesses else None,
            "grid_report": self.grid_report.summary(),
            "self_inclusion_evidence": self.self_inclusion_evidence.summary(),
            "details": self.details,
        }


@dataclass
class Escalation:
    R: float
    theta: float
    alpha: complex
    reason: str


@dataclass
class BudgetExhausted:
    N: int
    schedule: List[float]
    trace: List[Dict[str, Any]]

    def to_dict(self) -> Dict[str, Any]:
        return {"status": "BudgetExhausted", "N": self.N, "schedule": self.schedule, "trace": self.trace}


def _certify(spec: FunctionSpec, V: PlanarDomain, N: int, R: float, threads: int,
             constraint: str = "covering") -> Tuple[CoveringGridReport, CoveringGridReport]:
    """Grid evidence that V covers itself N times, at the dichotomy step and at half of it."""
    step = R / DICHOTOMY_GRID_DIVISIONS
    reports = []
    for grid_step in (step, step / 2.0):
        report = covering_report(spec, V, V, grid_step, N, threads)
        if not report.ok:
            raise CertificationFailed(f"{V.domain_id} does not cover itself {N} times at step {grid_step:g}",
                                      constraint, report.summary())
        reports.append(report)
    return reports[0], reports[1]


# --- first case ---

def _disk_meets(domain: PlanarDomain, center: complex, radius: float) -> bool:
    return float(distance_to_base(center, domain.base)[0]) < radius


def _nonrecurrence_holds(spec: FunctionSpec, d_r: PlanarDomain, alpha: complex, radius: float) -> Tuple[bool, bool]:
    """(condition holds, vacuous): no sampled image of Delta(alpha, radius) inside D_R lands in D_R."""
    if not _disk_meets(d_r, alpha, radius):
        return True, True
    offsets = np.linspace(-radius, radius, NONRECURRENCE_SAMPLES)
    grid = (offsets[None, :] + 1j * offsets[:, None]).ravel()
    samples = alpha + grid[np.abs(grid) < radius]
    samples = samples[d_r.contains(samples)]
    if samples.size == 0:
        return True, False
    with np.errstate(all="ignore"):
        images = spec.value(samples)
    images = images[np.isfinite(images)]
    return not bool(np.any(d_r.contains(images))), False


def _relocate_case1_witnesses(spec: FunctionSpec, R: float, theta: float, j: int,
                              alpha: complex) -> Tuple[complex, complex, float, float]:
    scan = scan_circle(spec, R)
    c_r = build_CR(R, theta)
    usable = c_r.contains(scan.points) & (np.abs(scan.points - alpha) >= R / 20.0)
    if not np.any(usable):
        raise CertificationFailed("C_R minus Delta(alpha, R/20) has no circle samples", "witness", {"R": R})
    idx = np.flatnonzero(usable)
    top = int(idx[int(np.argmax(scan.log_modulus[idx]))])
    if not scan.log_modulus[top] > j * math.log(R):
        raise CertificationFailed("no relocated w_M with |f| > R^j", "witness", {"R": R})
    small = idx[scan.log_modulus[idx] < math.log(3.0 * R)]
    if small.size == 0:
        raise CertificationFailed("no relocated w_m with |f| < 3R", "witness", {"R": R})
    offsets = np.array([_angular_gap(scan.angles[i], theta) for i in small])
    low = int(small[int(np.argmin(offsets))])
    return complex(scan.points[top]), complex(scan.points[low]), float(scan.log_modulus[top]), float(scan.log_modulus[low])


def case1_search(spec: FunctionSpec, R: float, theta: float, j: int, N: int, alpha: complex,
                 d: Optional[float] = WORKING_D, half_angle: float = DR_HALF_ANGLE, threads: int = 1,
                 witnesses: Optional[Witnesses] = None) -> Union[CoveringCertificate, Escalation]:
    """First case: alpha is missed by f on D_R."""
    alpha = complex(alpha)
    d_r = build_DR(R, theta, half_angle)
    excluded = R ** (-0.5 * j)
    holds, vacuous = _nonrecurrence_holds(spec, d_r, alpha, excluded)
    if holds:
        if _disk_meets(d_r, alpha, excluded):
            V = d_r.with_removed_disk(alpha, excluded, f"D_R-minus-alpha[R={R:g}]")
        else:
            V = d_r
        grid, refined = _certify(spec, V, N, R, threads)
        return CoveringCertificate(V, N, "I", R, witnesses, grid, refined,
                                   {"route": "non-recurrence", "vacuous": vacuous, "alpha": [alpha.real, alpha.imag],
                                    "excluded_radius": excluded})

    inside = bool(d_r.contains(alpha)) and float(d_r.boundary_distance(alpha)) >= R / 20.0
    if not inside:
        return Escalation(R, theta, alpha, "Delta(alpha, R/20) is not contained in D_R")

    w_M, w_m, log_M, log_m = _relocate_case1_witnesses(spec, R, theta, j, alpha)
    D = build_case1_domain(alpha, R, w_M, w_m, theta=theta, half_angle=half_angle)
    estimate = quasihyperbolic_upper(D, w_M, w_m, "relocated witnesses")
    if d is None:
        d = measure_working_d(R, N).d
    if estimate.upper_bound > d / 2.0:
        raise CertificationFailed(f"hyperbolic distance bound {estimate.upper_bound:.4f} exceeds d/2 = {d / 2.0:.4f}",
                                  "diameter", {"upper_bound": estimate.upper_bound, "d": d, "domain_id": D.domain_id})
    grid, refined = _certify(spec, D, N, R, threads)
    relocated = Witnesses(R, theta, j, w_M, w_m, log_M, log_m, {})
    return CoveringCertificate(D, N, "I", R, relocated, grid, refined,
                               {"route": "slit domain", "construction": D.meta, "diameter": estimate.to_dict(),
                                "alpha": [alpha.real, alpha.imag]})


# --- second case ---

@dataclass
class SublevelComponent:
    label: int
    members: np.ndarray
    diameter: float
    r_min: float
    r_max: float

    def to_dict(self) -> Dict[str, Any]:
        return {"label": self.label, "size": int(self.members.size), "diameter": self.diameter,
                "r_min": self.r_min, "r_max": self.r_max}


@dataclass
class SublevelSet:
    R: float
    threshold: float
    grid_step: float
    components: List[SublevelComponent]
    scan_radii: np.ndarray
    crossing: np.ndarray
    gap_radii: List[float]

    def crosses_all(self) -> bool:
        return not self.gap_radii

    def to_dict(self) -> Dict[str, Any]:
        return {"R": self.R, "threshold": self.threshold, "grid_step": self.grid_step,
                "components": [c.to_dict() for c in self.components], "gap_radii": self.gap_radii}


def _diameter(points: np.ndarray) -> float:
    if points.size < 2:
        return 0.0
    xy = np.column_stack([points.real, points.imag])
    if points.size > 3:
        try:
            xy = xy[ConvexHull(xy).vertices]
        except QhullError:
            direction = points[-1] - points[0]
            proj = np.real(points * np.conj(direction))
            xy = xy[[int(np.argmin(proj)), int(np.argmax(proj))]]
    diffs = xy[:, None, :] - xy[None, :, :]
    return float(np.sqrt(np.max(np.sum(diffs ** 2, axis=-1))))


def sublevel_components(spec: FunctionSpec, R: float, grid_step: Optional[float] = None) -> SublevelSet:
    """Connected components (4-adjacency) of A_R intersected with {|f| < 2R} on a lattice."""
    step = grid_step or R / SUBLEVEL_GRID_DIVISIONS
    if step > R / 200.0 * (1.0 + 1e-12):
        raise PreconditionViolated("sublevel grid step must be at most R/200", {"grid_step": step, "R": R})
    points, index = lattice_points(-2.0 * R, 2.0 * R, -2.0 * R, 2.0 * R, step)
    modulus = np.abs(points)
    in_annulus = (modulus > R / 2.0) & (modulus < 2.0 * R)
    member = np.zeros(points.size, dtype=bool)
    candidates = points[in_annulus]
    spec.check_validity(candidates)
    member[in_annulus] = np.real(spec.log_value(candidates)) < math.log(2.0 * R)

    rows, cols = index[:, 0] - index[:, 0].min(), index[:, 1] - index[:, 1].min()
    image = np.zeros((rows.max() + 1, cols.max() + 1), dtype=bool)
    image[rows[member], cols[member]] = True
    labels, count = ndimage.label(image)
    point_labels = labels[rows, cols]

    scan_radii = np.linspace(R / 2.0, 2.0 * R, SUBLEVEL_SCAN_RADII + 2)[1:-1]
    slack = step * math.sqrt(0.5)
    components: List[SublevelComponent] = []
    crossing = np.zeros((count, scan_radii.size), dtype=bool)
    for label in range(1, count + 1):
        members = points[point_labels == label]
        r = np.abs(members)
        component = SublevelComponent(label, members, _diameter(members), float(r.min()), float(r.max()))
        crossing[label - 1] = (scan_radii >= component.r_min - slack) & (scan_radii <= component.r_max + slack)
        components.append(component)
    gaps = [float(r) for r, hit in zip(scan_radii, crossing.any(axis=0)) if not hit]
    logging.info(f"sublevel set at R={R:g}: {count} components, {len(gaps)} gap radii")
    return SublevelSet(R, 2.0 * R, step, components, scan_radii, crossing, gaps)


def annulus_shortcut(spec: FunctionSpec, R: float, N: int, sublevel: Optional[SublevelSet] = None,
                     threads: int = 1) -> Tuple[Optional[CoveringCertificate], CoveringGridReport]:
    """V = A_R when every grid point of A_R already has N preimages in A_R.

    Returns (certificate or None, the A_R self-covering report used to measure ell).
    """
    a_r = build_AR(R)
    report = covering_report(spec, a_r, a_r, R / DICHOTOMY_GRID_DIVISIONS, N, threads)
    if not report.ok:
        return None, report
    refined = covering_report(spec, a_r, a_r, R / DICHOTOMY_GRID_DIVISIONS / 2.0, N, threads)
    if not refined.ok:
        return None, report
    tag = "IIb" if sublevel is None or sublevel.crosses_all() else "IIa"
    certificate = CoveringCertificate(a_r, N, tag, R, None, report, refined,
                                      {"route": "annulus self-covering", "ell": report.min_count})
    return certificate, report


def disk_certificate(spec: FunctionSpec, r: float, N: int, threads: int = 1) -> CoveringCertificate:
    """V = Delta(0, r) backed by grid counts; for maps with |f| > r on the boundary circle."""
    V = PlanarDomain(Disk(0j, r), simply_connected_flag=True, domain_id=f"disk[r={r:g}]")
    grid, refined = _certify(spec, V, N, r, threads)
    return CoveringCertificate(V, N, "IIa", r, None, grid, refined, {"route": "disk", "r": r})


def case2a_certificate(
spec: FunctionSpec, R: float, r_gap: float, N: int, threads: int = 1) -> CoveringCertificate:
    """Disk V = Delta(0, r_gap) whose boundary circle avoids the sublevel set W."""
    V = PlanarDomain(Disk(0j, r_gap), simply_connected_flag=True, domain_id=f"disk[r={r_gap:g}]")
    inner = PlanarDomain(Disk(0j, R / 2.0), simply_connected_flag=True, domain_id=f"disk[r={R / 2.0:g}]")
    value, inner_count = None, None
    for v in CASE2A_TEST_VALUES:
        inner_count = count_preimages(spec, inner, v).count
        if inner_count >= N:
            value = complex(v)
            break
    if value is None:
        raise NotEnoughPreimages(f"no test value has {N} preimages in Delta(0, R/2)",
                                 {"R": R, "last_count": inner_count})
    transfer = rouche_transfer(spec, V, 2.0 * R, value)
    if transfer.count < N:
        raise NotEnoughPreimages(f"transfer count {transfer.count} below {N}", transfer.to_dict())
    grid, refined = _certify(spec, V, N, R, threads)
    return CoveringCertificate(V, N, "IIa", R, None, grid, refined,
                               {"route": "gap circle", "r_gap": r_gap, "test_value": [value.real, value.imag],
                                "inner_count": inner_count, "rouche": transfer.to_dict()})


def _case2b_witnesses(spec: FunctionSpec, R: float, component: SublevelComponent, blocked: Sequence[complex],
                      sep: float) -> Tuple[complex, complex, float]:
    blocked = np.asarray(blocked, dtype=complex)
    members = component.members
    r = np.abs(members)
    ok = (r >= R / 2.0 + sep) & (r <= 2.0 * R - sep)
    if blocked.size:
        ok &= np.min(np.abs(members[:, None] - blocked[None, :]), axis=1) >= sep
    if not np.any(ok):
        raise CertificationFailed("no w_m in the long component away from the preimages", "separation", {"R": R})
    w_m = complex(members[np.flatnonzero(ok)[0]])

    blocked_moduli = np.abs(blocked)
    for radius in np.linspace(2.0 * R - sep, R / 2.0 + sep, 64):
        if blocked.size and np.min(np.abs(blocked_moduli - radius)) < sep:
            continue
        scan = scan_circle(spec, float(radius))
        far = np.abs(scan.points - w_m) >= sep
        if not np.any(far):
            continue
        idx = np.flatnonzero(far)
        top = int(idx[int(np.argmax(scan.log_modulus[idx]))])
        return w_m, complex(scan.points[top]), float(scan.log_modulus[top])
    raise CertificationFailed("no circle for w_M avoids the preimage disks", "separation", {"R": R})


def case2b_certificate(spec: FunctionSpec, R: float, N: int, j: int, d: float, sublevel: SublevelSet,
                       threads: int = 1, report: Optional[CoveringGridReport] = None) -> CoveringCertificate:
    """Slit annulus avoiding the few preimages of a poorly covered value alpha.

    `report` is the A_R self-covering report already computed by the caller;
    without it one is computed here. alpha is the least covered grid value of
    the closed annulus R/2 + eps*R <= |z| <= 2R - eps*R.
    """
    a_r = build_AR(R)
    if report is None:
        report = covering_report(spec, a_r, a_r, R / DICHOTOMY_GRID_DIVISIONS, N, threads)
    eps = 1.0 / (2.0 * N * (N + 2))
    r_lo, r_hi = R / 2.0 + eps * R, 2.0 * R - eps * R
    evaluated = [(complex(p), int(c)) for p, c in zip(report.points, report.counts)
                 if c >= 0 and r_lo <= abs(complex(p)) <= r_hi]
    if not evaluated:
        raise CertificationFailed("A_R grid has no evaluated points in the closed annulus", "ell",
                                  {"R": R, "eps": eps})
    ell = min(c for _, c in evaluated)
    alpha = min((p for p, c in evaluated if c == ell), key=_grid_order_key)
    if ell < 1:
        raise CertificationFailed("a value of A_R has no preimage in A_R", "ell", {"alpha": [alpha.real, alpha.imag]})
    long = [c for c in sublevel.components if c.diameter >= 3.0 * R / (2.0 * ell)]
    if not long:
        raise CertificationFailed(f"no sublevel component of diameter >= 3R/(2*{ell})", "component",
                                  {"R": R, "ell": ell})
    zetas = locate_preimages(spec, a_r, alpha)
    sep = R / (2.0 * ell * (ell + 2))
    w_m, w_M, log_M = _case2b_witnesses(spec, R, max(long, key=lambda c: c.diameter),
                                        [z.center for z in zetas] + [alpha], sep)
    if not log_M > j * math.log(R):
        raise CertificationFailed("w_M does not exceed R^j", "witness", {"R": R, "log_M": log_M})
    D = build_case2_domain(alpha, [z.center for z in zetas], eps, R, j, w_m, w_M)
    estimate = quasihyperbolic_upper(D, w_m, w_M, "case-2 witnesses")
    if estimate.upper_bound > d / 2.0:
        raise CertificationFailed(f"hyperbolic distance bound {estimate.upper_bound:.4f} exceeds d/2",
                                  "diameter", {"upper_bound": estimate.upper_bound, "d": d})
    grid, refined = _certify(spec, D, N, R, threads)
    witnesses = Witnesses(R, 0.0, j, w_M, w_m, log_M, float(spec.log_modulus(w_m)), {})
    return CoveringCertificate(D, N, "IIb", R, witnesses, grid, refined,
                               {"route": "slit annulus", "ell": ell, "alpha": [alpha.real, alpha.imag],
                                "preimages": [z.to_dict() for z in zetas], "eps": eps,
                                "diameter": estimate.to_dict(), "construction": D.meta})


# --- orchestration ---

def default_schedule(start: float = R_START, factor: float = R_FACTOR, steps: int = R_STEPS) -> List[float]:
    return [start * factor ** t for t in range(steps)]


def _case_two(spec: FunctionSpec, R: float, N: int, j: int, d: float, threads: int, trace: TraceLog) -> CoveringCertificate:
    sublevel = sublevel_components(spec, R)
    trace.push("sublevel", f"{len(sublevel.components)} components, {len(sublevel.gap_radii)} gap radii",
               {"components": [c.to_dict() for c in sublevel.components[:20]]}, R)
    shortcut, report = annulus_shortcut(spec, R, N, sublevel, threads)
    if shortcut is not None:
        trace.push("case", f"A_R covers itself {N} times (ell = {shortcut.details['ell']})", None, R)
        return shortcut
    if sublevel.gap_radii:
        for r_gap in sublevel.gap_radii:
            try:
                certificate = case2a_certificate(spec, R, r_gap, N, threads)
            except MarginTooSmall as error:
                trace.push("case2a", f"gap circle r={r_gap:g} not certified: {error}", None, R)
                continue
            trace.push("case", f"IIa disk certificate with r_gap={r_gap:g}", None, R)
            return certificate
        raise CertificationFailed("no gap circle passed the boundary modulus check", "margin", {"R": R})
    certificate = case2b_certificate(spec, R, N, j, d, sublevel, threads, report)
    trace.push("case", "IIb slit-annulus certificate", None, R)
    return certificate


def _record_run_constants(certificate: CoveringCertificate, working: WorkingD, hypotheses: HypothesisReport,
                          j: int, N: int, mode: str) -> CoveringCertificate:
    threshold = hypothesis_threshold(j, N, working.d)
    certificate.details["working_d"] = working.to_dict()
    certificate.details["hypotheses"] = {**hypotheses.to_dict(), "mode": mode}
    certificate.details["hypothesis_threshold_log_R"] = threshold
    if not hypotheses:
        logging.info(f"certificate at R={certificate.R:g} issued with failed hypotheses ({mode} mode)")
    return certificate


def find_self_covering_V(spec: FunctionSpec, N: int, R_schedule: Optional[Sequence[float]] = None,
                         budget: Optional[int] = None, d: Optional[float] = WORKING_D, mode: str = HYPOTHESES_MODE,
                         threads: int = 1, trace: Optional[TraceLog] = None, d_trials: int = D_TRIALS,
                         seed: int = DEFAULT_SEED) -> Union[CoveringCertificate, BudgetExhausted]:
    """Walks the radius schedule and returns the first covering certificate.

    With d=None the working d is measured once, at the first radius that needs it,
    and reused for the rest of the schedule.
    """
    if N < 1:
        raise PreconditionViolated("N must be at least 1", {"N": N})
    schedule = list(R_schedule or default_schedule())
    if budget is not None:
        schedule = schedule[:budget]
    trace = trace if trace is not None else TraceLog()
    working = configured_working_d(d) if d is not None else None

    def resolve_d(R: float) -> WorkingD:
        nonlocal working
        if working is None:
            working = measure_working_d(R, N, d_trials, seed)
            trace.push("working_d", f"measured d = {working.d:.4f}", working.to_dict(), R)
        return working

    for R in schedule:
        try:
            if mode == "strict":
                resolve_d(R)
            j = choose_j(spec, R, N, working.d if working is not None else None, mode)
            witnesses, reason = _find_witnesses(spec, R, j)
            if witnesses is None:
                trace.push("witnesses", reason, {"j": j}, R)
                continue
            trace.push("witnesses", f"theta={witnesses.theta:.4f}, ln M={witnesses.log_M:.4g}", witnesses.to_dict(), R)
            d = resolve_d(R).d
            hypotheses = check_dichotomy_hypotheses_log(witnesses.log_m, witnesses.log_M, R, j, N, d)
            trace.push("hypotheses", f"{'passed' if hypotheses else 'failed'} ({mode})", hypotheses.to_dict(), R)
            if mode == "strict" and not hypotheses:
                continue

            outcome = run_dichotomy(spec, R, witnesses.theta, j, N, d, hypotheses, threads=threads, mode=mode)
            trace.push("dichotomy", outcome.variant, outcome.to_dict(), R)
            if outcome.variant == OMITS_ALPHA:
                result = case1_search(spec, R, witnesses.theta, j, N, outcome.alpha, d, threads=threads,
                                      witnesses=witnesses)
                if isinstance(result, Escalation):
                    widened = DR_HALF_ANGLE + ESCALATION_WIDENING
                    trace.push("escalation", result.reason, {"half_angle": widened}, R)
                    second = run_dichotomy(spec, R, witnesses.theta, j, N, d, hypotheses, widened, threads, mode)
                    if second.variant == OMITS_ALPHA:
                        result = case1_search(spec, R, witnesses.theta, j, N, second.alpha, d, widened, threads,
                                              witnesses)
                        if isinstance(result, Escalation):
                            raise CertificationFailed("escalated domain still needs enlarging", "escalation",
                                                      {"R": R})
                    else:
                        trace.push("escalation", "widened sector covers A_R; moving to the second case", None, R)
                        result = _case_two(spec, R, N, j, d, threads, trace)
                trace.push("certificate", f"case {result.case_tag}", None, R)
                return _record_run_constants(result, working, hypotheses, j, N, mode)
            certificate = _case_two(spec, R, N, j, d, threads, trace)
            trace.push("certificate", f"case {certificate.case_tag}", None, R)
            return _record_run_constants(certificate, working, hypotheses, j, N, mode)
        except ToolkitError as error:
            trace.push("failure", f"{error.__class__.__name__}: {error}", error.to_dict(), R)
            continue
    return BudgetExhausted(N, schedule, trace.to_list())
