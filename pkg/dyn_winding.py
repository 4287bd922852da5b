"""
dyn_winding.py

Preimage counting by the argument principle.

The number of solutions of f(z) = w inside a domain, counted with multiplicity,
is the winding number of f - w along the oriented boundary. Contours come from
dyn_plane_domains (outer boundary counterclockwise, holes clockwise), so the
windings of all contours simply add up. Arguments are tracked through log f,
which keeps exp-type functions finite at large radii, and contour edges are
bisected until every argument step stays below ARG_STEP_LIMIT.

Main Classes:
- PreimageCount: Result of one count.
- BoundaryCache: Contours of one domain with cached log f values, refined lazily.
- RoucheTransfer: Count valid for a whole disk of targets.
- CoveringGridReport: Counts over a target grid.
- PreimageCluster: A located preimage (or a tight cluster) with its multiplicity.

Main Functions:
- winding_number: Winding of a closed polyline around w.
- count_preimages, count_on_contour: Argument-principle counts.
- rouche_transfer: Boundary-margin certificate for a disk of targets.
- covering_report: Counts on every grid point of a target domain.
- locate_preimages: Quadtree search with winding counts, polished by Newton steps.

Dependencies:
- numpy: Vectorised argument tracking over many targets at once.
- concurrent.futures: Parallel evaluation of grid batches.

Author: Dynamics Toolkit Team
Last updated: 2026-10-18
"""

import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from dyn_settings import (ARG_STEP_LIMIT, BOUNDARY_GAP_TOL, CONTOUR_EDGE_DIVISIONS, REFINEMENT_EDGE_BUDGET,
                          SUBDIVISION_BUDGET, resolve_threads)
from dyn_function_model import FunctionSpec
from dyn_plane_domains import PlanarDomain
from utils.errors import (BoundaryHit, MarginTooSmall, NeedsRefinement, OnTarget, PreconditionViolated,
                          RefinementBudgetExceeded, SubdivisionBudgetExceeded, ToolkitError)
from utils.grid_utils import box_contour, lattice_points

TWO_PI = 2.0 * np.pi
BATCH_SIZE = 64
SPLIT_RATIOS = (0.5 + 0.0137, 0.5 - 0.0211, 0.5 + 0.0293)


@dataclass
class PreimageCount:
    target: complex
    domain_id: str
    count: int
    min_boundary_gap: float
    refinement_depth: int = 0

    def to_dict(self) -> Dict[str, Any]:
        gap = self.min_boundary_gap
        return {"target": [self.target.real, self.target.imag], "domain_id": self.domain_id, "count": self.count,
                "min_boundary_gap": gap if math.isfinite(gap) else None, "refinement_depth": self.refinement_depth}


def _wrap(angle: np.ndarray) -> np.ndarray:
    return (angle + np.pi) % TWO_PI - np.pi


def _arg_increments(args: np.ndarray) -> np.ndarray:
    return _wrap(np.roll(args, -1, axis=-1) - args)


def winding_number(image_points: Sequence[complex], w: complex, step_limit: float = ARG_STEP_LIMIT) -> int:
    """Winding number of the closed polyline (last point joined to the first) around w."""
    diffs = np.asarray(image_points, dtype=complex) - complex(w)
    if np.any(diffs == 0):
        raise OnTarget("an image point equals the target", {"target": [complex(w).real, complex(w).imag]})
    increments = _arg_increments(np.angle(diffs))
    worst = float(np.max(np.abs(increments))) if increments.size else 0.0
    if worst > step_limit:
        raise NeedsRefinement(f"argument step {worst:.3f} exceeds {step_limit:.3f}",
                              {"bad_edges": int(np.sum(np.abs(increments) > step_limit))})
    return int(round(float(np.sum(increments)) / TWO_PI))


def shifted_log(log_f: np.ndarray, w) -> np.ndarray:
    """log(f - w) from log f, without forming f.

    Where |f| >= |w| it uses log f + log1p(-w/f), elsewhere log(-w) + log1p(-f/w);
    both forms only exponentiate quantities of modulus at most one.
    """
    w = np.asarray(w, dtype=complex)
    with np.errstate(all="ignore"):
        log_w = np.log(np.where(w == 0, 1.0, w))
        large = log_f.real >= log_w.real
        near_f = log_f + np.log1p(-np.exp(log_w - log_f))
        near_w = log_w + 1j * np.pi + np.log1p(-np.exp(log_f - log_w))
        out = np.where(large, near_f, near_w)
    return np.where(w == 0, log_f, out)


def _log_error(spec: FunctionSpec, points: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(spec.error_bound(points))


class _Loop:
    """One closed contour with cached log f and log of the model error."""

    def __init__(self, spec: FunctionSpec, points: np.ndarray):
        spec.check_validity(points)
        self.spec = spec
        self.points = np.asarray(points, dtype=complex)
        self.log_f = spec.log_value(self.points)
        self.log_err = _log_error(spec, self.points)
        self.depth = 0

    def bisect(self, edges: np.ndarray) -> None:
        nxt = (edges + 1) % self.points.size
        mids = 0.5 * (self.points[edges] + self.points[nxt])
        self.spec.check_validity(mids)
        self.points = np.insert(self.points, edges + 1, mids)
        self.log_f = np.insert(self.log_f, edges + 1, self.spec.log_value(mids))
        self.log_err = np.insert(self.log_err, edges + 1, _log_error(self.spec, mids))

    def examine(self, w: complex, step_limit: float) -> Tuple[np.ndarray, np.ndarray, float]:
        """(increments, bad edge indices, log of the smallest gap |f - w|) for one target."""
        log_g = shifted_log(self.log_f, w)
        log_gap = float(np.min(log_g.real)) if log_g.size else math.inf
        _check_gap(w, log_g.real, self.log_err)
        increments = _arg_increments(log_g.imag)
        return increments, np.flatnonzero(np.abs(increments) > step_limit), log_gap


def _check_gap(w: complex, log_gap: np.ndarray, log_err: np.ndarray) -> None:
    tolerance = math.log(BOUNDARY_GAP_TOL * (1.0 + abs(w)))
    worst = float(np.min(log_gap)) if log_gap.size else math.inf
    if not worst >= tolerance:
        raise BoundaryHit(f"target {w} is attained on the boundary (gap e^{worst:.2f})",
                          {"target": [w.real, w.imag]})
    if np.any(log_err >= log_gap):
        raise BoundaryHit(f"model error reaches the boundary gap for target {w}", {"target": [w.real, w.imag]})


def _refined_winding(loop: _Loop, w: complex, step_limit: float, budget: int) -> Tuple[int, float]:
    while True:
        increments, bad, log_gap = loop.examine(w, step_limit)
        if bad.size == 0:
            return int(round(float(np.sum(increments)) / TWO_PI)), log_gap
        if loop.points.size + bad.size > budget:
            raise RefinementBudgetExceeded(f"contour refinement passed {budget} edges",
                                           {"edges": int(loop.points.size), "target": [w.real, w.imag]})
        loop.bisect(bad)
        loop.depth += 1
        logging.debug(f"bisected {bad.size} contour edges for target {w} (depth {loop.depth})")


def count_on_contour(spec: FunctionSpec, points: Sequence[complex], w: complex,
                     step_limit: float = ARG_STEP_LIMIT, budget: int = REFINEMENT_EDGE_BUDGET) -> int:
    """Solutions of f(z) = w enclosed by a closed counterclockwise polyline."""
    count, _ = _refined_winding(_Loop(spec, np.asarray(points, dtype=complex)), complex(w), step_limit, budget)
    return count


class BoundaryCache:
    """Boundary contours of a domain with log f cached on every vertex.

    Refinement done for one target is kept and reused for the next ones.
    """

    def __init__(self, spec: FunctionSpec, domain: PlanarDomain, max_edge_length: Optional[float] = None,
                 step_limit: float = ARG_STEP_LIMIT, budget: int = REFINEMENT_EDGE_BUDGET):
        self.spec = spec
        self.domain = domain
        self.step_limit = step_limit
        self.budget = budget
        edge = max_edge_length or domain.scale() / CONTOUR_EDGE_DIVISIONS
        self.contours = domain.boundary_contour(edge)
        self.loops = [_Loop(spec, contour.points) for contour in self.contours]

    @property
    def depth(self) -> int:
        return max((loop.depth for loop in self.loops), default=0)

    def count(self, w: complex) -> PreimageCount:
        w = complex(w)
        total, log_gap = 0, math.inf
        for loop in self.loops:
            winding, gap = _refined_winding(loop, w, self.step_limit, self.budget)
            total += winding
            log_gap = min(log_gap, gap)
        return PreimageCount(w, self.domain.domain_id, total, _exp(log_gap), self.depth)

    def count_batch(self, targets: np.ndarray) -> List[Union[PreimageCount, ToolkitError]]:
        """Counts many targets on the current vertices without refining.

        Targets whose argument steps are too coarse come back as NeedsRefinement,
        boundary hits as BoundaryHit; nothing is mutated.
        """
        targets = np.asarray(targets, dtype=complex)
        totals = np.zeros(targets.size, dtype=float)
        log_gaps = np.full(targets.size, math.inf)
        errors: Dict[int, ToolkitError] = {}
        tolerance = np.log(BOUNDARY_GAP_TOL * (1.0 + np.abs(targets)))
        for loop in self.loops:
            log_g = shifted_log(loop.log_f[None, :], targets[:, None])
            gap_rows = log_g.real
            increments = _arg_increments(log_g.imag)
            log_gaps = np.minimum(log_gaps, np.min(gap_rows, axis=1))
            hit = (np.min(gap_rows, axis=1) < tolerance) | np.any(loop.log_err[None, :] >= gap_rows, axis=1)
            coarse = np.any(np.abs(increments) > self.step_limit, axis=1)
            for i in np.flatnonzero(hit):
                errors.setdefault(int(i), BoundaryHit("target attained on the boundary",
                                                      {"target": [targets[i].real, targets[i].imag]}))
            for i in np.flatnonzero(coarse & ~hit):
                errors.setdefault(int(i), NeedsRefinement("contour too coarse for target",
                                                          {"target": [targets[i].real, targets[i].imag]}))
            totals += np.sum(increments, axis=1)
        depth = self.depth
        return [errors.get(i) or PreimageCount(complex(w), self.domain.domain_id, int(round(totals[i] / TWO_PI)),
                                              _exp(float(log_gaps[i])), depth)
                for i, w in enumerate(targets)]


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def count_preimages(spec: FunctionSpec, domain: PlanarDomain, w: complex,
                    max_edge_length: Optional[float] = None) -> PreimageCount:
    """Solutions of f(z) = w in the domain, counted with multiplicity."""
    return BoundaryCache(spec, domain, max_edge_length).count(w)


# --- Rouché transfer ---

@dataclass
class RoucheTransfer:
    count: int
    r: float
    margin: float
    xi: complex
    certified_min: float
    domain_id: str
    note: str = "sampled boundary minimum with first-derivative slack on edge midpoints; numerical evidence, not a proof"

    def to_dict(self) -> Dict[str, Any]:
        return {"count": self.count, "r": self.r, "margin": self.margin, "xi": [self.xi.real, self.xi.imag],
                "certified_min": self.certified_min, "domain_id": self.domain_id, "note": self.note}


def _edge_lower_bounds(spec: FunctionSpec, points: np.ndarray, safety: float) -> Tuple[np.ndarray, np.ndarray]:
    """(per-edge lower bound of |f|, vertex moduli) on a closed polyline."""
    nxt = np.roll(points, -1)
    mids = 0.5 * (points + nxt)
    with np.errstate(over="ignore", invalid="ignore"):
        modulus = np.exp(np.real(spec.log_value(points))) - spec.error_bound(points)
        slope = np.abs(spec.derivative_value(mids)) + spec.derivative_error_bound(mids)
        lower = np.minimum(modulus, np.roll(modulus, -1)) - 0.5 * np.abs(nxt - points) * slope * safety
    return np.nan_to_num(lower, nan=-np.inf), modulus


def rouche_transfer(spec: FunctionSpec, domain: PlanarDomain, r: float, xi: complex,
                    max_edge_length: Optional[float] = None, safety: float = 2.0, rounds: int = 16) -> RoucheTransfer:
    """Certifies |f| >= r on the boundary, so every w with |w| < r has the preimage count of xi."""
    xi = complex(xi)
    if not abs(xi) < r:
        raise PreconditionViolated("xi must lie in the disk of radius r", {"xi": [xi.real, xi.imag], "r": r})
    cache = BoundaryCache(spec, domain, max_edge_length)
    certified = math.inf
    for loop in cache.loops:
        points = loop.points
        lower, modulus = _edge_lower_bounds(spec, points, safety)
        for _ in range(rounds):
            weak = np.flatnonzero(lower < r)
            if weak.size == 0 or float(np.min(modulus)) < r or points.size + weak.size > cache.budget:
                break
            points = np.insert(points, weak + 1, 0.5 * (points[weak] + np.roll(points, -1)[weak]))
            lower, modulus = _edge_lower_bounds(spec, points, safety)
        certified = min(certified, float(np.min(lower)))
    margin = certified - r
    if not margin > 0:
        raise MarginTooSmall(f"boundary modulus bound {certified:.6g} does not exceed r = {r:.6g}",
                             {"certified_min": certified, "r": r, "domain_id": domain.domain_id})
    count = cache.count(xi).count
    return RoucheTransfer(count, r, margin, xi, certified, domain.domain_id)


# --- grid covering reports ---

@dataclass
class CoveringGridReport:
    source_id: str
    target_id: str
    N: int
    grid_step: float
    points: np.ndarray
    grid_index: np.ndarray
    counts: np.ndarray
    failing: List[Dict[str, Any]] = field(default_factory=list)
    skipped: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def evaluated(self) -> np.ndarray:
        return self.counts >= 0

    @property
    def min_count(self) -> Optional[int]:
        done = self.counts[self.evaluated]
        return int(done.min()) if done.size else None

    @property
    def fraction_ok(self) -> float:
        done = self.counts[self.evaluated]
        if done.size == 0:
            return 1.0
        return float(np.mean(done >= self.N))

    @property
    def ok(self) -> bool:
        return self.points.size > 0 and not self.failing and not self.skipped

    def summary(self) -> Dict[str, Any]:
        return {"source_id": self.source_id, "target_id": self.target_id, "N": self.N, "grid_step": self.grid_step,
                "points": int(self.points.size), "min_count": self.min_count, "fraction_ok": self.fraction_ok,
                "failing": len(self.failing), "skipped": len(self.skipped)}

    def to_dict(self) -> Dict[str, Any]:
        data = self.summary()
        data["failing_points"] = self.failing
        data["skipped_points"] = self.skipped
        data["grid"] = [[int(r), int(c), float(p.real), float(p.imag), int(n)]
                        for (r, c), p, n in zip(self.grid_index, self.points, self.counts)]
        return data

    def csv_rows(self) -> List[List[Any]]:
        rows = [["row", "col", "re", "im", "count", "status"]]
        for (r, c), p, n in zip(self.grid_index, self.points, self.counts):
            status = "skipped" if n < 0 else ("ok" if n >= self.N else "failing")
            rows.append([int(r), int(c), float(p.real), float(p.imag), int(n), status])
        return rows


def _point_entry(index: np.ndarray, point: complex, **extra) -> Dict[str, Any]:
    entry = {"grid_index": [int(index[0]), int(index[1])], "point": [float(point.real), float(point.imag)]}
    entry.update(extra)
    return entry


def target_grid(target: PlanarDomain, grid_step: float) -> Tuple[np.ndarray, np.ndarray]:
    """Lattice points of the target interior, ordered by grid index."""
    points, index = lattice_points(*target.bounding_box(), grid_step)
    inside = target.contains(points) if points.size else np.zeros(0, dtype=bool)
    return points[inside], index[inside]


def covering_report(spec: FunctionSpec, source: PlanarDomain, target: PlanarDomain, grid_step: float, N: int,
                    threads: int = 1, max_edge_length: Optional[float] = None,
                    cache: Optional[BoundaryCache] = None) -> CoveringGridReport:
    """Preimage counts in `source` for every lattice point of `target`.

    Batches are first counted in parallel on a read-only snapshot of the
    boundary; targets needing finer contours are then handled serially in grid
    order. Boundary hits are reported as skipped points.
    """
    if grid_step <= 0:
        raise PreconditionViolated("grid_step must be positive", {"grid_step": grid_step})
    points, index = target_grid(target, grid_step)
    counts = np.full(points.size, -1, dtype=int)
    report = CoveringGridReport(source.domain_id, target.domain_id, N, grid_step, points, index, counts)
    if points.size == 0:
        logging.warning(f"target {target.domain_id} has no grid points at step {grid_step:g}")
        return report

    cache = cache or BoundaryCache(spec, source, max_edge_length)
    batches = [np.arange(start, min(start + BATCH_SIZE, points.size)) for start in range(0, points.size, BATCH_SIZE)]
    workers = min(resolve_threads(threads), len(batches))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda batch: cache.count_batch(points[batch]), batches))
    else:
        results = [cache.count_batch(points[batch]) for batch in batches]

    pending: List[int] = []
    for batch, outcome in zip(batches, results):
        for i, result in zip(batch, outcome):
            if isinstance(result, PreimageCount):
                counts[i] = result.count
            elif isinstance(result, NeedsRefinement):
                pending.append(int(i))
            else:
                report.skipped.append(_point_entry(index[i], points[i], reason=result.__class__.__name__))
    for i in pending:
        try:
            counts[i] = cache.count(points[i]).count
        except BoundaryHit as error:
            report.skipped.append(_point_entry(index[i], points[i], reason=error.__class__.__name__))

    report.skipped.sort(key=lambda e: tuple(e["grid_index"]))
    report.failing = [_point_entry(index[i], points[i], count=int(counts[i]))
                      for i in np.flatnonzero((counts >= 0) & (counts < N))]
    logging.info(f"covering {source.domain_id} -> {target.domain_id}: {points.size} points, "
                 f"min count {report.min_count}, {len(report.failing)} failing, {len(report.skipped)} skipped")
    return report


# --- preimage location ---

@dataclass
class PreimageCluster:
    center: complex
    multiplicity: int
    radius: float

    def to_dict(self) -> Dict[str, Any]:
        return {"center": [self.center.real, self.center.imag], "multiplicity": self.multiplicity, "radius": self.radius}


Box = Tuple[float, float, float, float]


def _box_center(box: Box) -> complex:
    return complex(0.5 * (box[0] + box[1]), 0.5 * (box[2] + box[3]))


def _box_half(box: Box) -> float:
    return 0.5 * max(box[1] - box[0], box[3] - box[2])


def _in_box(z: complex, box: Box) -> bool:
    return box[0] <= z.real <= box[1] and box[2] <= z.imag <= box[3]


def _box_count(spec: FunctionSpec, box: Box, w: complex) -> int:
    center = _box_center(box)
    return count_on_contour(spec, box_contour(center, 0.5 * (box[1] - box[0]), 0.5 * (box[3] - box[2])), w)


def _newton(spec: FunctionSpec, w: complex, z: complex, box: Box, iterations: int = 40) -> Optional[complex]:
    """Newton iteration for f(z) = w that must converge without leaving the box."""
    with np.errstate(all="ignore"):
        for _ in range(iterations):
            fz = complex(spec.value(np.array([z]))[0]) - w
            dz = complex(spec.derivative_value(np.array([z]))[0])
            if dz == 0 or not np.isfinite(dz) or not np.isfinite(fz):
                return None
            step = fz / dz
            z = z - step
            if not _in_box(z, box):
                return None
            if abs(step) <= 1e-13 * (1.0 + abs(z)):
                return z
    return None


def _split(spec: FunctionSpec, box: Box, w: complex) -> Optional[List[Tuple[Box, int]]]:
    """Four counted sub-boxes, trying off-centre cuts until no cut meets a preimage."""
    x0, x1, y0, y1 = box
    for ratio in SPLIT_RATIOS:
        xc, yc = x0 + ratio * (x1 - x0), y0 + ratio * (y1 - y0)
        children = [(xa, xb, ya, yb) for ya, yb in ((y0, yc), (yc, y1)) for xa, xb in ((x0, xc), (xc, x1))]
        try:
            return [(child, _box_count(spec, child, w)) for child in children]
        except BoundaryHit:
            continue
    return None


def locate_preimages(spec: FunctionSpec, domain: PlanarDomain, w: complex, tol: Optional[float] = None,
                     cap: Optional[int] = None, budget: int = SUBDIVISION_BUDGET) -> List[PreimageCluster]:
    """Preimages of w inside the domain, found by quadtree subdivision with winding counts.

    Boxes holding a single preimage are finished by Newton steps; boxes shrinking
    below `tol` with several preimages become clusters carrying the multiplicity.
    Results follow the subdivision order, so `cap` keeps a deterministic prefix.
    """
    w = complex(w)
    xmin, xmax, ymin, ymax = domain.bounding_box()
    pad = 1e-3 * max(xmax - xmin, ymax - ymin)
    tol = tol or 1e-7 * domain.scale()
    queue: List[Tuple[Box, int]] = []
    for shift in (0.0, 0.0123, -0.0171):
        offset = shift * (xmax - xmin)
        root_box = (xmin - pad + offset, xmax + pad + offset, ymin - pad + offset, ymax + pad + offset)
        try:
            queue = [(root_box, _box_count(spec, root_box, w))]
            break
        except BoundaryHit:
            continue
    if not queue:
        raise BoundaryHit("target attained on every root box", {"target": [w.real, w.imag]})

    clusters: List[PreimageCluster] = []
    evaluations = 0

    def keep(cluster: PreimageCluster) -> None:
        if domain.contains(cluster.center):
            clusters.append(cluster)

    while queue and (cap is None or len(clusters) < cap):
        box, count = queue.pop(0)
        if count == 0:
            continue
        if count == 1:
            root = _newton(spec, w, _box_center(box), box)
            if root is not None:
                keep(PreimageCluster(root, 1, 0.0))
                continue
        if _box_half(box) <= tol:
            keep(PreimageCluster(_box_center(box), count, _box_half(box) * math.sqrt(2.0)))
            continue
        children = _split(spec, box, w)
        evaluations += 4
        if evaluations > budget:
            raise SubdivisionBudgetExceeded(f"preimage search passed {budget} box evaluations",
                                            {"target": [w.real, w.imag], "found": len(clusters)})
        if children is None:
            keep(PreimageCluster(_box_center(box), count, _box_half(box) * math.sqrt(2.0)))
            continue
        queue.extend(children)

    logging.debug(f"located {len(clusters)} preimage clusters of {w} in {domain.domain_id}")
    return clusters
