"""
dyn_hyperbolic.py

Hyperbolic-metric estimates used by the covering dichotomy.

All distances use curvature -4 (unit-disk density 1/(1-|z|^2)). The density of
the twice punctured plane C minus {0, 1} exceeds 1/(2|z| ln|z|) once ln|z| is
at least the Hempel constant K = Gamma(1/4)^4/(4 pi^2), in particular for
|z| > e^5. Integrating that bound radially from e^5 gives the closed form
(ln ln s2 - ln ln s1)/2, and the admissible constant k(d) = exp(5 e^d) is the
modulus at which that integral reaches d/2.

Hyperbolic distances inside constructed slit domains are never computed
exactly. For a simply connected domain the density is at most 1/dist(z, boundary),
so the length of any path in the quasihyperbolic metric bounds the hyperbolic
distance from above. The bound is minimised over a lattice graph with networkx.

Main Classes:
- HyperbolicConfig: Fixed constants of the estimates.
- AnnulusBounds: Radii of the annulus covered N times (empty marker included).
- DiameterEstimate: Upper bound on a hyperbolic distance with its witness path.
- WorkingD: The constant d used by a search, measured or configured.

Main Functions:
- omega01_density_lower, radial_distance_lower, k_constant, lemma2_floor
- annulus_AN, forced_value_check
- quasihyperbolic_upper, diameter_upper, measure_d_constant, measure_working_d

Dependencies:
- numpy, scipy.special (gamma), networkx (shortest paths)

Author: Dynamics Toolkit Team
Last updated: 2026-10-18
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import networkx as nx
from scipy.special import gamma

from dyn_settings import D_MARGIN, D_TRIALS, DEFAULT_SEED, QUASIHYPERBOLIC_GRID_DIVISIONS
from dyn_plane_domains import PlanarDomain, build_case1_domain, build_case2_domain, build_CR
from utils.errors import (BelowThreshold, Disconnected, HypothesisFailed, Inconclusive, NotSimplyConnected,
                          PreconditionViolated, ToolkitError)
from utils.grid_utils import lattice_points, spawn_generators

HEMPEL_K = gamma(0.25) ** 4 / (4.0 * math.pi ** 2)
VALIDITY_THRESHOLD = math.exp(5.0)
LOG_VALIDITY_THRESHOLD = 5.0


@dataclass(frozen=True)
class HyperbolicConfig:
    curvature_normalization: float = -4.0
    K_hempel: float = HEMPEL_K
    validity_threshold: float = VALIDITY_THRESHOLD


DEFAULT_CONFIG = HyperbolicConfig()


@dataclass
class AnnulusBounds:
    """Annulus {r_lower < |z - center| < r_upper}; `empty` when r_lower >= r_upper."""

    r_lower: float
    r_upper: float
    center: complex
    empty: bool
    log_r_lower: float
    log_r_upper: float

    def contains(self, w: complex) -> bool:
        if self.empty:
            return False
        return self.r_lower < abs(complex(w) - self.center) < self.r_upper

    def to_dict(self) -> Dict[str, Any]:
        return {"r_lower": self.r_lower, "r_upper": self.r_upper,
                "center": [self.center.real, self.center.imag], "empty": self.empty,
                "log_r_lower": _finite_or_none(self.log_r_lower), "log_r_upper": _finite_or_none(self.log_r_upper)}


@dataclass
class DiameterEstimate:
    domain_id: str
    subset_id: str
    upper_bound: float
    path_witness: List[complex] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"domain_id": self.domain_id, "subset_id": self.subset_id, "upper_bound": self.upper_bound,
                "path_witness": [[p.real, p.imag] for p in self.path_witness]}


def _finite_or_none(x: float) -> Optional[float]:
    return float(x) if math.isfinite(x) else None


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


# --- density and radial distances ---

def omega01_density_lower(z: complex) -> float:
    """Lower bound 1/(2|z| ln|z|) for the density of C minus {0, 1}, valid for |z| > e^5."""
    modulus = abs(z)
    if modulus <= VALIDITY_THRESHOLD:
        raise BelowThreshold(f"|z| = {modulus:.6g} is not above e^5", {"modulus": modulus})
    return 1.0 / (2.0 * modulus * math.log(modulus))


def radial_distance_lower_log(log_s1: float, log_s2: float) -> float:
    """radial_distance_lower for moduli given by their logarithms."""
    if not LOG_VALIDITY_THRESHOLD <= log_s1 <= log_s2:
        raise BelowThreshold("radial bound needs e^5 <= s1 <= s2", {"log_s1": log_s1, "log_s2": log_s2})
    return 0.5 * (math.log(log_s2) - math.log(log_s1))


def radial_distance_lower(s1: float, s2: float) -> float:
    if not VALIDITY_THRESHOLD <= s1 <= s2:
        raise BelowThreshold("radial bound needs e^5 <= s1 <= s2", {"s1": s1, "s2": s2})
    return radial_distance_lower_log(math.log(s1), math.log(s2))


def k_constant_log(d: float) -> float:
    if d < 0:
        raise PreconditionViolated(f"d must be non-negative, got {d}", {"d": d})
    return 5.0 * math.exp(d)


def k_constant(d: float) -> float:
    """k(d) = exp(5 e^d); infinite when it overflows a double."""
    return _safe_exp(k_constant_log(d))


# --- growth floor and covered annuli ---

def lemma2_floor_log(log_alpha_mod: float, log_M: float, d: float) -> float:
    """Log of |alpha|^((e^d-1)/e^d) * M^(1/e^d), requiring ln M > ln k(d) + ln|alpha|."""
    if not log_M > k_constant_log(d) + log_alpha_mod:
        raise HypothesisFailed("M must exceed k(d)*|alpha|", {"log_M": log_M, "log_alpha_mod": log_alpha_mod, "d": d})
    weight = math.exp(-d)
    return (1.0 - weight) * log_alpha_mod + weight * log_M


def lemma2_floor(alpha_mod: float, M: float, d: float) -> float:
    """Lower bound on |f| over a set of hyperbolic diameter below d/2 once one value exceeds M > k(d)|alpha|."""
    if alpha_mod <= 0:
        raise PreconditionViolated("alpha_mod must be positive", {"alpha_mod": alpha_mod})
    k = k_constant(d)
    if math.isfinite(k) and not M > k * alpha_mod:
        raise HypothesisFailed("M must exceed k(d)*|alpha|", {"M": M, "alpha_mod": alpha_mod, "d": d})
    return _safe_exp(lemma2_floor_log(math.log(alpha_mod), math.log(M), d))


def _log_or_neg_inf(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


def _log_abs_difference(log_a: float, log_b: float) -> float:
    """log|a - b| from log a and log b."""
    hi, lo = max(log_a, log_b), min(log_a, log_b)
    if hi == lo:
        return -math.inf
    if lo == -math.inf:
        return hi
    return hi + math.log1p(-math.exp(lo - hi))


def annulus_AN_log(log_m: float, log_M: float, d: float, N: int,
                   log_alpha_mod: Optional[float] = None) -> Tuple[float, float]:
    """(log r_lower, log r_upper) of the annulus covered N times; logs may be -inf."""
    if log_alpha_mod is None:
        log_num, log_den = log_m, log_M
    else:
        log_num = np.logaddexp(log_m, log_alpha_mod)
        log_den = _log_abs_difference(log_M, log_alpha_mod)
    if d == 0:
        # exponent limit as e^d -> 1
        log_lower = -math.inf if log_num < log_den else math.inf
    elif log_num == -math.inf:
        log_lower = -math.inf
    else:
        E = math.exp(d)
        log_lower = (E * log_num - log_den) / (E - 1.0)
    log_upper = log_den - N * k_constant_log(d)
    return float(log_lower), float(log_upper)


def annulus_AN(m: float, M: float, d: float, N: int, alpha: Optional[complex] = None) -> AnnulusBounds:
    """Annulus of values with at least N preimages, centred at 0 or at an omitted value alpha."""
    if not 0 <= m < M or N < 1:
        raise PreconditionViolated("annulus needs 0 <= m < M and N >= 1", {"m": m, "M": M, "N": N})
    center = 0j if alpha is None else complex(alpha)
    log_alpha = None if alpha is None else _log_or_neg_inf(abs(center))
    log_lower, log_upper = annulus_AN_log(_log_or_neg_inf(m), math.log(M), d, N, log_alpha)
    empty = not log_lower < log_upper
    return AnnulusBounds(_safe_exp(log_lower), _safe_exp(log_upper), center, empty, log_lower, log_upper)


def forced_value_check(alpha_mod: float, M: float, small_modulus: float, d: float) -> bool:
    """True when a value of modulus alpha_mod must be attained.

    That holds when |alpha| < M/k(d) and some point of the set takes a value of
    modulus at most |alpha|^(1-1/e^d) * M^(1/e^d). Evaluated in log-space.
    """
    if alpha_mod <= 0 or M <= 0:
        return False
    log_alpha, log_M = math.log(alpha_mod), math.log(M)
    if not log_alpha < log_M - k_constant_log(d):
        return False
    weight = math.exp(-d)
    return _log_or_neg_inf(small_modulus) <= (1.0 - weight) * log_alpha + weight * log_M


# --- quasihyperbolic upper bounds ---

def _segment_weight(delta_a: np.ndarray, delta_b: np.ndarray, length: np.ndarray) -> np.ndarray:
    """Upper bound for the integral of 1/dist along a segment from the endpoint distances.

    The distance to the boundary is 1-Lipschitz, so along the segment it stays
    above max(delta_a - t, delta_b - (L - t)). Returns inf when the two
    boundary-free disks do not cover the segment.
    """
    hi, lo = np.maximum(delta_a, delta_b), np.minimum(delta_a, delta_b)
    c = 0.5 * (delta_a + delta_b - length)
    with np.errstate(divide="ignore", invalid="ignore"):
        one_sided = np.log(hi / (hi - length))
        two_sided = np.log(delta_a * delta_b / (c * c))
    weight = np.where(hi - lo > length, one_sided, two_sided)
    return np.where((c > 0) & (lo > 0), weight, np.inf)


def quasihyperbolic_upper(domain: PlanarDomain, z1: complex, z2: complex, subset_id: str = "pair",
                          divisions: int = QUASIHYPERBOLIC_GRID_DIVISIONS) -> DiameterEstimate:
    """Upper bound on the hyperbolic distance between z1 and z2 in a simply connected domain."""
    z1, z2 = complex(z1), complex(z2)
    if not domain.is_simply_connected():
        raise NotSimplyConnected(f"domain {domain.domain_id} is not simply connected", {"domain_id": domain.domain_id})
    ends = np.array([z1, z2])
    if not np.all(domain.contains(ends)):
        raise PreconditionViolated("both points must lie inside the domain", {"domain_id": domain.domain_id})
    if z1 == z2:
        return DiameterEstimate(domain.domain_id, subset_id, 0.0, [z1, z2])

    step = domain.scale() / divisions
    xmin, xmax, ymin, ymax = domain.bounding_box()
    points, index = lattice_points(xmin, xmax, ymin, ymax, step)
    inside = domain.contains(points) if points.size else np.zeros(0, dtype=bool)
    points, index = points[inside], index[inside]
    nodes = np.concatenate([points, ends])
    delta = domain.boundary_distance(nodes)
    n = points.size
    src, dst = n, n + 1

    edges_a: List[np.ndarray] = []
    edges_b: List[np.ndarray] = []
    if n:
        rows, cols = index[:, 0] - index[:, 0].min(), index[:, 1] - index[:, 1].min()
        ids = -np.ones((rows.max() + 1, cols.max() + 1), dtype=int)
        ids[rows, cols] = np.arange(n)
        for dr, dc in ((0, 1), (1, 0), (1, 1), (1, -1)):
            r2, c2 = rows + dr, cols + dc
            ok = (r2 < ids.shape[0]) & (c2 >= 0) & (c2 < ids.shape[1])
            nb = np.full(n, -1)
            nb[ok] = ids[r2[ok], c2[ok]]
            keep = nb >= 0
            edges_a.append(np.flatnonzero(keep))
            edges_b.append(nb[keep])
        for terminal in (src, dst):
            near = np.flatnonzero(np.abs(points - nodes[terminal]) <= 2.0 * step)
            edges_a.append(np.full(near.size, terminal))
            edges_b.append(near)
    edges_a.append(np.array([src]))
    edges_b.append(np.array([dst]))
    a, b = np.concatenate(edges_a), np.concatenate(edges_b)
    weight = _segment_weight(delta[a], delta[b], np.abs(nodes[a] - nodes[b]))
    usable = np.isfinite(weight)

    graph = nx.Graph()
    graph.add_nodes_from([src, dst])
    graph.add_weighted_edges_from(zip(a[usable].tolist(), b[usable].tolist(), weight[usable].tolist()))
    try:
        length, path = nx.single_source_dijkstra(graph, src, dst, weight="weight")
    except nx.NetworkXNoPath:
        raise Disconnected(f"no lattice path joins the points in {domain.domain_id}",
                           {"domain_id": domain.domain_id, "step": step})
    return DiameterEstimate(domain.domain_id, subset_id, float(length), [complex(nodes[i]) for i in path])


def diameter_upper(domain: PlanarDomain, samples: Sequence[complex], subset_id: str = "samples",
                   divisions: int = QUASIHYPERBOLIC_GRID_DIVISIONS) -> DiameterEstimate:
    """Largest pairwise quasihyperbolic bound over a finite sample of a subset."""
    samples = [complex(s) for s in samples]
    best = DiameterEstimate(domain.domain_id, subset_id, 0.0, samples[:1])
    for i in range(len(samples)):
        for j in range(i + 1, len(samples)):
            estimate = quasihyperbolic_upper(domain, samples[i], samples[j], subset_id, divisions)
            if estimate.upper_bound > best.upper_bound:
                best = estimate
    return best


# --- Monte-Carlo measurement of d ---

def _uniform_in_sector(rng: np.random.Generator, r_in: float, r_out: float, theta: float, half_angle: float) -> complex:
    radius = rng.uniform(r_in, r_out)
    angle = theta + rng.uniform(-half_angle, half_angle)
    return complex(radius * np.exp(1j * angle))


def _case1_trial(rng: np.random.Generator, R: float, params: Dict[str, Any], divisions: int) -> float:
    theta = float(params.get("theta", 0.0))
    c_r = build_CR(R, theta).base
    margin = 1e-6 * R
    draw = lambda: _uniform_in_sector(rng, c_r.r_in + margin, c_r.r_out - margin, theta, c_r.half_angle - 1e-6)
    z1, z2 = draw(), draw()
    for _ in range(1000):
        alpha = _uniform_in_sector(rng, R / 2.0, 2.0 * R, 0.0, math.pi)
        if min(abs(z1 - alpha), abs(z2 - alpha)) >= R / 20.0:
            break
    else:
        raise PreconditionViolated("no admissible alpha found", {"R": R})
    domain = build_case1_domain(alpha, R, z1, z2, theta=theta)
    return quasihyperbolic_upper(domain, z1, z2, "C_R witnesses", divisions).upper_bound


def _case2_trial(rng: np.random.Generator, R: float, params: Dict[str, Any], divisions: int) -> float:
    N = int(params.get("N", 2))
    eps = float(params.get("eps", 1.0 / (2.0 * N * (N + 2))))
    ell = int(params.get("ell", 0))
    jexp = float(params.get("jexp", 4.0))
    r_lo, r_hi = R / 2.0 + eps * R, 2.0 * R - eps * R
    z1 = _uniform_in_sector(rng, r_lo, r_hi, 0.0, math.pi)
    z2 = _uniform_in_sector(rng, r_lo, r_hi, 0.0, math.pi)

    def separated_draw() -> complex:
        for _ in range(1000):
            x = _uniform_in_sector(rng, r_lo, r_hi, 0.0, math.pi)
            if min(abs(x - z1), abs(x - z2)) >= eps * R:
                return x
        raise PreconditionViolated("no admissible point found", {"R": R, "eps": eps})

    alpha = separated_draw()
    avoided = [separated_draw() for _ in range(ell)]
    domain = build_case2_domain(alpha, avoided, eps, R, jexp, z1, z2)
    return quasihyperbolic_upper(domain, z1, z2, "A_R witnesses", divisions).upper_bound


def measure_d_constant(R: float, trials: int, scenario: str, params: Optional[Dict[str, Any]] = None,
                       seed: int = DEFAULT_SEED, divisions: int = QUASIHYPERBOLIC_GRID_DIVISIONS) -> float:
    """Largest quasihyperbolic bound between witnesses over random admissible configurations.

    Trial t always draws from the t-th stream split off `seed`, and within a
    trial the witnesses and alpha are drawn before any avoided points. Trials
    whose construction fails are logged and left out.
    """
    if trials < 1:
        raise PreconditionViolated("trials must be at least 1", {"trials": trials})
    params = params or {}
    trial = {"case1": _case1_trial, "case2": _case2_trial}.get(scenario)
    if trial is None:
        raise PreconditionViolated(f"unknown scenario {scenario}", {"scenario": scenario})
    values = []
    for index, rng in enumerate(spawn_generators(seed, trials)):
        try:
            values.append(trial(rng, R, params, divisions))
        except ToolkitError as error:
            logging.warning(f"d trial {index} ({scenario}, R={R:g}) skipped: {error.__class__.__name__}: {error}")
    if not values:
        raise Inconclusive(f"no {scenario} trial produced a domain", {"R": R, "trials": trials, "seed": seed})
    logging.info(f"measured d/2 for {scenario} at R={R:g}: max {max(values):.4f} over {len(values)}/{trials} trials")
    return float(max(values))


@dataclass
class WorkingD:
    d: float
    source: str
    R: Optional[float] = None
    trials: int = 0
    margin: float = 1.0
    half_by_scenario: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"d": self.d, "source": self.source, "R": self.R, "trials": self.trials, "margin": self.margin,
                "half_by_scenario": dict(self.half_by_scenario)}


def configured_working_d(d: float) -> WorkingD:
    if not d > 0:
        raise PreconditionViolated("d must be positive", {"d": d})
    return WorkingD(float(d), "configured")


def measure_working_d(R: float, N: int, trials: int = D_TRIALS, seed: int = DEFAULT_SEED, margin: float = D_MARGIN,
                      divisions: int = QUASIHYPERBOLIC_GRID_DIVISIONS) -> WorkingD:
    """d = 2 * margin * (largest witness distance over both constructions).

    Quasihyperbolic distances do not change under z -> cz, so one radius serves a whole search.
    """
    if margin < 1.0:
        raise PreconditionViolated("margin must be at least 1", {"margin": margin})
    halves = {"case1": measure_d_constant(R, trials, "case1", {}, seed, divisions),
              "case2": measure_d_constant(R, trials, "case2", {"N": N}, seed, divisions)}
    d = 2.0 * margin * max(halves.values())
    logging.info(f"working d = {d:.4f} (R={R:g}, {trials} trials per construction)")
    return WorkingD(d, "measured", R, trials, margin, halves)
