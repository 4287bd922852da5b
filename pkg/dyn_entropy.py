"""
dyn_entropy.py

Entropy lower bounds from separated orbit sets and from covering certificates.

Two routes are provided:

- Direct estimation on a compact set X: greedy (n, delta)-separated packings of
  a seed cloud whose orbits stay in X, tabulated over n and delta.
- Certificate route: a covering certificate (V inside f(V), at least N
  preimages everywhere) gives N^m backward branches per block of m steps. The
  critical points of f inside V cost at most their local degrees, so counting
  epsilon-separated backward orbits of a base point w yields a lower bound
  close to log N.

Main Classes:
- CompactSet: Seed cloud plus membership test.
- SeparatedSet, EntropyEstimate: Packing results and the (n, delta) table.
- CriticalPoint, CriticalData: Zeros of f' in V with local degrees and periodicity.
- BackwardOrbitParams, BackwardOrbitCount, EntropyBound: Certificate route.

Main Functions:
- separated_set_lower, entropy_lower_curve, entropy_trend
- critical_data, prepare_backward_orbit_params
- enumerate_backward_orbits, backward_orbit_separated_count
- certificate_entropy_bound, theoretical_entropy_floor, example_product_entropy_floor

Dependencies:
- numpy
- scipy (spatial.cKDTree for the Chebyshev prefilter, stats.qmc.Halton for base points)
- concurrent.futures: Sibling branches of the backward tree are expanded in parallel.

Author: Dynamics Toolkit Team
Last updated: 2026-10-18
"""

import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree
from scipy.stats import qmc

from dyn_settings import DEFAULT_SEED, ENUMERATION_BUDGET, PERIOD_BUDGET, resolve_threads
from dyn_function_model import FunctionSpec
from dyn_plane_domains import Disk, PlanarDomain
from dyn_winding import PreimageCluster, count_preimages, locate_preimages, winding_number
from utils.errors import (EnumerationBudgetExceeded, Inconclusive, PreconditionViolated, ToolkitError)
from utils.grid_utils import circle_points, lattice_points

UNIT_CIRCLE_SAMPLES = 2 ** 14
CIRCLE_MEMBERSHIP_TOL = 1e-9
PAIR_LIMIT = 4_000_000
CRITICAL_TOL = 1e-8
PERIOD_RETURN_TOL = 1e-7
SHIELD_SAMPLES = 64
SHIELD_HALVINGS = 40
BASE_POINT_CANDIDATES = 1024
ESCAPE_MODULUS = 1e150


# --- compact sets ---

@dataclass
class CompactSet:
    """A finite seed cloud inside X together with the membership test of X."""

    set_id: str
    points: np.ndarray
    contains: Callable[[np.ndarray], np.ndarray]
    meta: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"set_id": self.set_id, "seeds": int(self.points.size), **self.meta}


def unit_circle_set(samples: int = UNIT_CIRCLE_SAMPLES, radius: float = 1.0, center: complex = 0j) -> CompactSet:
    """Roots of unity (scaled to the given circle) with a thin membership tolerance."""
    _, points = circle_points(complex(center), radius, samples)
    tol = CIRCLE_MEMBERSHIP_TOL * radius

    def on_circle(z: np.ndarray) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return np.abs(np.abs(np.asarray(z) - center) - radius) <= tol

    return CompactSet(f"circle[c={complex(center):g},r={radius:g}]", points, on_circle,
                      {"kind": "circle", "center": [complex(center).real, complex(center).imag], "radius": radius})


def domain_set(domain: PlanarDomain, step: float) -> CompactSet:
    """Lattice seeds of a planar domain; membership is the closed-up domain test."""
    xmin, xmax, ymin, ymax = domain.bounding_box()
    points, _ = lattice_points(xmin, xmax, ymin, ymax, step)
    points = points[domain.contains(points)]

    def inside(z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        finite = np.isfinite(z)
        result = np.zeros(z.shape, dtype=bool)
        result[finite] = domain.contains(z[finite])
        return result

    return CompactSet(f"domain[{domain.domain_id}]", points, inside,
                      {"kind": "domain", "domain": domain.to_dict(), "step": step})


def point_cloud_set(set_id: str, points: Sequence[complex], contains: Callable[[np.ndarray], np.ndarray]) -> CompactSet:
    return CompactSet(set_id, np.asarray(points, dtype=complex), contains, {"kind": "cloud"})


# --- separated sets ---

@dataclass
class SeparatedSet:
    n: int
    delta: float
    K_lower: int
    seeds_used: int
    stride: int
    kept: np.ndarray

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "delta": self.delta, "K_lower": self.K_lower, "seeds_used": self.seeds_used,
                "stride": self.stride}


def _orbits(spec: FunctionSpec, X: CompactSet, n: int) -> np.ndarray:
    """Orbit segments (rows) of the seeds whose first n iterates stay in X."""
    z = X.points.copy()
    alive = np.isfinite(z) & X.contains(z)
    orbit = np.empty((z.size, n), dtype=complex)
    orbit[:, 0] = z
    for k in range(1, n):
        alive &= np.abs(z) < spec.validity_radius
        with np.errstate(all="ignore"):
            z = np.where(alive, spec.value(np.where(alive, z, 0j)), np.nan)
        alive &= np.isfinite(z) & X.contains(z)
        orbit[:, k] = z
    return orbit[alive]


def _bowen_distance(orbit: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    return np.max(np.abs(orbit[lo] - orbit[hi]), axis=1)


def separated_set_lower(spec: FunctionSpec, X: CompactSet, n: int, delta: float) -> SeparatedSet:
    """Greedy (n, delta)-separated packing over the seeds of X.

    A seed is kept when its n-orbit stays in X and its Bowen distance
    max_k |f^k(z) - f^k(y)| exceeds delta for every kept y. Candidate conflicts
    come from a Chebyshev ball query on the stacked real orbit coordinates,
    which contains every Bowen ball of the same radius.
    """
    if n < 1 or not delta > 0:
        raise PreconditionViolated("separated sets need n >= 1 and delta > 0", {"n": n, "delta": delta})
    orbit = _orbits(spec, X, n)
    stride = 1
    if orbit.shape[0] > 1:
        vectors = np.column_stack([orbit.real, orbit.imag])
        tree = cKDTree(vectors)
        pairs = (int(tree.count_neighbors(tree, delta, p=np.inf)) - orbit.shape[0]) // 2
        if pairs > PAIR_LIMIT:
            stride = int(math.ceil(math.sqrt(pairs / PAIR_LIMIT)))
            orbit = orbit[::stride]
            vectors = vectors[::stride]
            tree = cKDTree(vectors)
            logging.debug(f"separated set n={n} delta={delta:g}: thinning seeds by {stride}")
        candidates = tree.query_pairs(delta, p=np.inf, output_type="ndarray")
    else:
        candidates = np.empty((0, 2), dtype=np.intp)

    count = orbit.shape[0]
    kept = np.zeros(count, dtype=bool)
    if count:
        lo, hi = candidates[:, 0], candidates[:, 1]
        conflict = _bowen_distance(orbit, lo, hi) <= delta
        lo, hi = lo[conflict], hi[conflict]
        order = np.argsort(hi, kind="stable")
        lo, hi = lo[order], hi[order]
        starts = np.searchsorted(hi, np.arange(count), side="left")
        ends = np.searchsorted(hi, np.arange(count), side="right")
        for i in range(count):
            kept[i] = not kept[lo[starts[i]:ends[i]]].any()
    return SeparatedSet(n, float(delta), int(kept.sum()), count, stride, orbit[kept, 0])


@dataclass
class EntropyEstimate:
    compact_set_id: str
    n_max: int
    deltas: List[float]
    table: Dict[Tuple[int, float], int]
    curve: Dict[int, float]
    h_lower: float
    curve_max: float

    def csv_rows(self) -> List[Tuple[int, float, int]]:
        return [(n, delta, self.table[(n, delta)]) for n in range(1, self.n_max + 1) for delta in self.deltas]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "compact_set_id": self.compact_set_id,
            "n_max": self.n_max,
            "deltas": self.deltas,
            "table": [{"n": n, "delta": d, "K_lower": k} for n, d, k in self.csv_rows()],
            "curve": {str(n): v for n, v in self.curve.items()},
            "h_lower": self.h_lower,
            "curve_max": self.curve_max,
        }


def entropy_lower_curve(spec: FunctionSpec, X: CompactSet, n_max: int, delta_list: Sequence[float]) -> EntropyEstimate:
    """Fills the (n, delta) table and reports the growth rate of K_lower.

    K_lower is made nonincreasing in delta by carrying the best packing of every
    larger delta. h_lower is the best increment (ln K(n) - ln K(1)) / (n - 1).
    """
    if n_max < 2:
        raise PreconditionViolated("entropy curves need n_max >= 2", {"n_max": n_max})
    if not delta_list:
        raise PreconditionViolated("entropy curves need at least one delta", {})
    deltas = sorted({float(d) for d in delta_list})
    table: Dict[Tuple[int, float], int] = {}
    for n in range(1, n_max + 1):
        best = 0
        for delta in reversed(deltas):
            best = max(best, separated_set_lower(spec, X, n, delta).K_lower)
            table[(n, delta)] = best
        logging.info(f"entropy table {X.set_id}: n={n}, K at delta={deltas[0]:g} is {table[(n, deltas[0])]}")

    finest = deltas[0]
    curve = {n: (math.log(table[(n, finest)]) / n if table[(n, finest)] > 0 else 0.0) for n in range(1, n_max + 1)}
    h_lower = 0.0
    for delta in deltas:
        base = table[(1, delta)]
        if base == 0:
            continue
        for n in range(2, n_max + 1):
            h_lower = max(h_lower, (math.log(table[(n, delta)]) - math.log(base)) / (n - 1))
    return EntropyEstimate(X.set_id, n_max, deltas, table, curve, h_lower, max(0.0, max(curve.values())))


def entropy_trend(estimate: EntropyEstimate) -> Dict[str, float]:
    """Least-squares slope of ln K(n, finest delta) against n; an extrapolation aid only."""
    finest = estimate.deltas[0]
    ns = np.arange(1, estimate.n_max + 1, dtype=float)
    logs = np.array([math.log(max(estimate.table[(int(n), finest)], 1)) for n in ns])
    slope, intercept = np.polyfit(ns, logs, 1)
    return {"slope": float(slope), "intercept": float(intercept), "delta": finest}


def example_product_entropy_floor(i: int) -> float:
    """Entropy floor log(i) of the lacunary product at the scale holding i zeros."""
    if i < 1:
        raise PreconditionViolated("the zero count must be at least 1", {"i": i})
    return math.log(i)


# --- critical points ---

@dataclass
class CriticalPoint:
    location: complex
    local_degree: int
    is_periodic: bool
    period: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"location": [self.location.real, self.location.imag], "local_degree": self.local_degree,
                "is_periodic": self.is_periodic, "period": self.period}


@dataclass
class CriticalData:
    critical_points: List[CriticalPoint]
    degree_product: int
    period_budget: int

    @property
    def non_periodic(self) -> List[CriticalPoint]:
        return [c for c in self.critical_points if not c.is_periodic]

    @property
    def periodic(self) -> List[CriticalPoint]:
        return [c for c in self.critical_points if c.is_periodic]

    def to_dict(self) -> Dict[str, Any]:
        return {"critical_points": [c.to_dict() for c in self.critical_points], "degree_product": self.degree_product,
                "period_budget": self.period_budget}


def forward_orbit(spec: FunctionSpec, z: complex, steps: int) -> List[complex]:
    """z, f(z), ... up to `steps` iterates; stops early on escape or leaving the model's validity."""
    orbit = [complex(z)]
    for _ in range(steps):
        current = orbit[-1]
        if not abs(current) < spec.validity_radius:
            break
        with np.errstate(all="ignore"):
            nxt = complex(spec.value(np.array([current]))[0])
        if not np.isfinite(nxt) or abs(nxt) > ESCAPE_MODULUS:
            break
        orbit.append(nxt)
    return orbit


def _period(spec: FunctionSpec, c: complex, budget: int) -> Optional[int]:
    """First return time of c within the budget; near returns count as returns."""
    orbit = forward_orbit(spec, c, budget)
    tol = PERIOD_RETURN_TOL * (1.0 + abs(c))
    for p, z in enumerate(orbit[1:], start=1):
        if abs(z - c) <= tol:
            return p
    return None


def critical_data(spec: FunctionSpec, V: PlanarDomain, period_budget: int = PERIOD_BUDGET) -> CriticalData:
    """Zeros of f' in V with local degree 1 + multiplicity, tested for periodicity by forward iteration."""
    derivative = spec.derivative_spec()
    if getattr(derivative, "polynomial_degree", None) == 0:
        if not np.any(derivative.coeffs):
            raise PreconditionViolated("f' vanishes identically; critical points are undefined",
                                       {"function": spec.label()})
        logging.info(f"critical data in {V.domain_id}: f' is a nonzero constant, no critical points")
        return CriticalData([], 1, period_budget)
    clusters = locate_preimages(derivative, V, 0j)
    points: List[CriticalPoint] = []
    for cluster in clusters:
        if cluster.radius == 0.0:
            residual = abs(complex(derivative.value(np.array([cluster.center]))[0]))
            if residual > CRITICAL_TOL * (1.0 + abs(cluster.center)):
                logging.warning(f"critical point {cluster.center} has residual |f'| = {residual:.3g}")
        period = _period(spec, cluster.center, period_budget)
        points.append(CriticalPoint(cluster.center, 1 + cluster.multiplicity, period is not None, period))
    degree_product = 1
    for point in points:
        if not point.is_periodic:
            degree_product *= point.local_degree
    logging.info(f"critical data in {V.domain_id}: {len(points)} points, degree product {degree_product}")
    return CriticalData(points, degree_product, period_budget)


# --- backward orbits ---

@dataclass
class BackwardOrbitParams:
    base_point: complex
    m: int
    k: int
    eps: float
    rho: float
    superattracting_exclusion: List[Disk] = field(default_factory=list)
    degree_product: int = 1
    shield_verified: bool = False
    branch_cap: Optional[int] = None

    @property
    def depth(self) -> int:
        return self.m * self.k

    def excluded(self, z: complex) -> bool:
        return any(abs(z - disk.center) < disk.radius for disk in self.superattracting_exclusion)

    def to_dict(self) -> Dict[str, Any]:
        return {"base_point": [self.base_point.real, self.base_point.imag], "m": self.m, "k": self.k,
                "eps": self.eps, "rho": self.rho, "superattracting_exclusion": [d.to_dict() for d in
                                                                                self.superattracting_exclusion],
                "degree_product": self.degree_product, "shield_verified": self.shield_verified,
                "branch_cap": self.branch_cap}


def _iterate(spec: FunctionSpec, z: np.ndarray, times: int) -> np.ndarray:
    for _ in range(times):
        inside = np.isfinite(z) & (np.abs(z) < spec.validity_radius)
        with np.errstate(all="ignore"):
            z = np.where(inside, spec.value(np.where(inside, z, 0j)), np.nan)
    return z


def _shield_holds(spec: FunctionSpec, x: complex, rho: float, m: int) -> bool:
    """f^n(Delta(x, rho)) misses Delta(x, rho) for n = 1..m, judged on the boundary circle."""
    _, boundary = circle_points(x, rho, SHIELD_SAMPLES)
    images = boundary
    for _ in range(m):
        images = _iterate(spec, images, 1)
        if not np.all(np.isfinite(images)):
            return False
        if np.min(np.abs(images - x)) <= rho:
            return False
        try:
            if winding_number(images, x) != 0:
                return False
        except ToolkitError:
            return False
    return True


def _absorbing_radius(spec: FunctionSpec, x: complex, period: int, start: float) -> Optional[float]:
    """Largest halving of `start` whose disk is mapped into itself by f^period."""
    radius = start
    for _ in range(SHIELD_HALVINGS):
        _, boundary = circle_points(x, radius, SHIELD_SAMPLES)
        images = _iterate(spec, boundary, period)
        if np.all(np.isfinite(images)) and np.max(np.abs(images - x)) < radius:
            return radius
        radius /= 2.0
    return None


def prepare_backward_orbit_params(spec: FunctionSpec, V: PlanarDomain, R: float, m: int, k: int,
                                  critical: Optional[CriticalData] = None, seed: int = DEFAULT_SEED,
                                  branch_cap: Optional[int] = None, eps: Optional[float] = None) -> BackwardOrbitParams:
    """Shield radius rho, exclusion disks around super-attracting cycles, base point w and separation eps."""
    if m < 0 or k < 0:
        raise PreconditionViolated("block sizes must be non-negative", {"m": m, "k": k})
    critical = critical if critical is not None else critical_data(spec, V)

    rho = R / 10.0
    verified = False
    for _ in range(SHIELD_HALVINGS):
        if all(_shield_holds(spec, c.location, rho, m) for c in critical.non_periodic):
            verified = True
            break
        rho /= 2.0
    if not verified:
        raise Inconclusive("no shield radius found for the critical points", {"rho": rho, "m": m})

    exclusion: List[Disk] = []
    for c in critical.periodic:
        cycle = forward_orbit(spec, c.location, (c.period or 1) - 1)
        for point in cycle:
            if not V.contains(point):
                continue
            radius = _absorbing_radius(spec, point, c.period or 1, R / 10.0)
            if radius is None:
                raise Inconclusive("super-attracting cycle has no absorbing disk", {"point": [point.real, point.imag]})
            exclusion.append(Disk(point, radius))

    orbit_points: List[complex] = []
    for c in critical.critical_points:
        orbit_points.extend(forward_orbit(spec, c.location, max(m * k, 1)))

    xmin, xmax, ymin, ymax = V.bounding_box()
    sampler = qmc.Halton(d=2, scramble=True, seed=seed)
    unit = sampler.random(BASE_POINT_CANDIDATES)
    candidates = (xmin + unit[:, 0] * (xmax - xmin)) + 1j * (ymin + unit[:, 1] * (ymax - ymin))
    base_point = None
    for w in candidates:
        w = complex(w)
        if not V.contains(w) or any(abs(w - d.center) < d.radius for d in exclusion):
            continue
        if any(abs(w - p) < 2.0 * rho for p in orbit_points):
            continue
        base_point = w
        break
    if base_point is None:
        raise Inconclusive("no admissible base point in V", {"candidates": BASE_POINT_CANDIDATES})

    params = BackwardOrbitParams(base_point, m, k, 0.0, rho, exclusion, critical.degree_product, verified, branch_cap)
    if eps is None:
        first = [c.center for c in _children(spec, V, base_point, params)]
        gaps = [abs(a - b) for i, a in enumerate(first) for b in first[i + 1:]]
        eps = 0.5 * min(gaps) if gaps else rho
    params.eps = float(eps)
    logging.info(f"backward orbit params: w={base_point:.6g}, rho={rho:.3g}, eps={params.eps:.3g}")
    return params


def _children(spec: FunctionSpec, V: PlanarDomain, y: complex, params: BackwardOrbitParams) -> List[PreimageCluster]:
    clusters = locate_preimages(spec, V, y, cap=params.branch_cap)
    return [c for c in clusters if not params.excluded(c.center)]


def _separated_children(clusters: List[PreimageCluster], eps: float) -> List[complex]:
    """Greedy sibling pruning: clusters within eps of a kept sibling share its branch."""
    kept: List[complex] = []
    for cluster in clusters:
        if all(abs(cluster.center - z) > eps for z in kept):
            kept.append(cluster.center)
    return kept


@dataclass
class BackwardOrbitCount:
    count: int
    depth: int
    level_sizes: List[int]
    floor: float
    meets_floor: bool
    log_margin: float
    consistency_mismatches: List[Dict[str, Any]] = field(default_factory=list)

    def __int__(self) -> int:
        return self.count

    def to_dict(self) -> Dict[str, Any]:
        return {"count": self.count, "depth": self.depth, "level_sizes": self.level_sizes, "floor": self.floor,
                "meets_floor": self.meets_floor, "log_margin": self.log_margin,
                "consistency_mismatches": self.consistency_mismatches}


def enumerate_backward_orbits(spec: FunctionSpec, V: PlanarDomain, params: BackwardOrbitParams,
                              budget: int = ENUMERATION_BUDGET, threads: int = 1,
                              check_consistency: bool = False) -> Tuple[int, List[int], List[Dict[str, Any]]]:
    """Level-by-level backward tree of the base point inside V minus the exclusion disks.

    Returns (leaf count, level sizes, consistency mismatches). Sibling branches
    of a level are expanded in parallel; results keep the serial order.
    """
    level = [complex(params.base_point)]
    sizes = [1]
    mismatches: List[Dict[str, Any]] = []
    threads = resolve_threads(threads)
    total = 1

    def expand(y: complex) -> Tuple[List[complex], Optional[Dict[str, Any]]]:
        located = locate_preimages(spec, V, y, cap=params.branch_cap)
        clusters = [c for c in located if not params.excluded(c.center)]
        mismatch = None
        if check_consistency and params.branch_cap is None:
            found = sum(c.multiplicity for c in located)
            expected = count_preimages(spec, V, y).count
            if found != expected:
                mismatch = {"node": [y.real, y.imag], "found": found, "expected": expected}
        return _separated_children(clusters, params.eps), mismatch

    batch = threads if threads > 1 else 1
    for depth in range(params.depth):
        next_level: List[complex] = []
        for start in range(0, len(level), batch):
            chunk = level[start:start + batch]
            if len(chunk) > 1:
                with ThreadPoolExecutor(max_workers=threads) as pool:
                    results = list(pool.map(expand, chunk))
            else:
                results = [expand(y) for y in chunk]
            for children, entry in results:
                next_level.extend(children)
                total += len(children)
                if entry is not None:
                    mismatches.append(entry)
            # checked per batch so a runaway level stops before it is fully built
            if total > budget:
                raise EnumerationBudgetExceeded(f"backward tree passed {budget} nodes",
                                                {"depth": depth + 1, "nodes": total,
                                                 "expanded_parents": start + len(chunk), "level_parents": len(level)})
        level = next_level
        sizes.append(len(level))
        logging.info(f"backward tree level {depth + 1}/{params.depth}: {len(level)} nodes")
        if not level:
            break
    return len(level), sizes, mismatches


def _floor_log(N: int, params: BackwardOrbitParams) -> float:
    return params.k * (params.m * math.log(N) - math.log(params.degree_product))


def backward_orbit_separated_count(spec: FunctionSpec, cert, params: BackwardOrbitParams,
                                   budget: int = ENUMERATION_BUDGET, threads: int = 1,
                                   check_consistency: bool = False) -> BackwardOrbitCount:
    """eps-separated backward orbits of length k*m in the certificate's V, compared with (N^m/degree_product)^k."""
    count, sizes, mismatches = enumerate_backward_orbits(spec, cert.V, params, budget, threads, check_consistency)
    floor_log = _floor_log(cert.N, params)
    log_count = math.log(count) if count > 0 else -math.inf
    margin = log_count - floor_log
    return BackwardOrbitCount(count, params.depth, sizes, math.exp(floor_log), margin >= -1e-12, margin, mismatches)


def theoretical_entropy_floor(N: int, degree_product: int, m: int) -> float:
    """log N - log(degree_product)/m."""
    if N < 1 or degree_product < 1 or m < 1:
        raise PreconditionViolated("floor needs N, degree_product and m of at least 1",
                                   {"N": N, "degree_product": degree_product, "m": m})
    return math.log(N) - math.log(degree_product) / m


@dataclass
class EntropyBound:
    measured: float
    floor: float
    count: BackwardOrbitCount
    params: BackwardOrbitParams

    def to_dict(self) -> Dict[str, Any]:
        return {"measured": self.measured, "floor": self.floor, "count": self.count.to_dict(),
                "params": self.params.to_dict()}


def certificate_entropy_bound(spec: FunctionSpec, cert, params: BackwardOrbitParams,
                              budget: int = ENUMERATION_BUDGET, threads: int = 1) -> EntropyBound:
    """(1/(k*m)) log(count) next to the floor log N - log(degree_product)/m."""
    if params.depth == 0:
        raise PreconditionViolated("entropy bound needs m*k >= 1", params.to_dict())
    result = backward_orbit_separated_count(spec, cert, params, budget, threads)
    measured = math.log(result.count) / params.depth if result.count > 0 else 0.0
    floor = theoretical_entropy_floor(cert.N, params.degree_product, params.m)
    logging.info(f"certificate entropy bound: measured {measured:.4f}, floor {floor:.4f}")
    return EntropyBound(measured, floor, result, params)
