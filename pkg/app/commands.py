"""
app/commands.py

Command implementations behind start_cli.py.

Each command takes a validated RunConfig, runs one pipeline, writes its
artifacts into the configured output directory and returns a process exit code
(0 success, 3 honest negative). Configuration problems raise ConfigError, which
the entry script maps to exit code 2.

Classes:
- RunConfig: Per-run configuration loaded from JSON and overridden by flags.

Functions:
- load_run_config: Reads and validates a RunConfig file.
- cmd_covering_search: Self-covering domain search with certificate, trace and figures.
- cmd_entropy: Separated-set entropy curve and/or the certificate entropy bound.
- cmd_example_product: Lacunary product checks (annulus difference, disk counts, entropy floor).

Author: Dynamics Toolkit Team
Last updated: 2026-10-18
"""

import os
import json
import math
import logging
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional

import numpy as np

from dyn_settings import (DEFAULT_SEED, HYPOTHESES_MODE, OUTPUT_DIR, R_FACTOR, R_START, R_STEPS, THREADS, WORKING_D,
                          resolve_threads)
from dyn_function_model import FunctionSpec, LacunaryProduct, scan_circle, spec_from_dict
from dyn_plane_domains import Disk, PlanarDomain
from dyn_winding import count_preimages
from dyn_covering import (BudgetExhausted, CoveringCertificate, default_schedule, disk_certificate,
                          find_self_covering_V)
from dyn_entropy import (CompactSet, CriticalData, certificate_entropy_bound, critical_data, domain_set,
                         entropy_lower_curve, entropy_trend, example_product_entropy_floor, prepare_backward_orbit_params,
                         theoretical_entropy_floor, unit_circle_set)
from dyn_report_utils import (artifact_meta, render_curve_svg, render_domain_svg, render_heatmap_svg, save_csv,
                              save_json, save_svg)
from app.trace_utils import TraceLog
from utils.errors import ConfigError, ToolkitError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NEGATIVE = 3


@dataclass
class RunConfig:
    function: Dict[str, Any]
    N: int = 2
    R_start: float = R_START
    R_factor: float = R_FACTOR
    R_steps: int = R_STEPS
    d: Optional[float] = WORKING_D
    mode: str = HYPOTHESES_MODE
    seed: int = DEFAULT_SEED
    threads: int = THREADS
    out_dir: str = OUTPUT_DIR
    entropy: Dict[str, Any] = field(default_factory=dict)
    certificate_bound: Dict[str, Any] = field(default_factory=dict)
    example: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("run configuration must be a JSON object", {"type": type(data).__name__})
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}", {"keys": unknown})
        if "function" not in data:
            raise ConfigError("configuration needs a 'function' object", {})
        config = cls(**data)
        try:
            config.validate()
        except TypeError as e:
            raise ConfigError(f"invalid parameter type: {e}", {}) from e
        return config

    def validate(self) -> None:
        checks = {"N": self.N >= 1, "R_start": self.R_start > 1, "R_factor": self.R_factor > 1,
                  "R_steps": self.R_steps >= 1, "d": self.d is None or self.d > 0, "seed": self.seed >= 0,
                  "threads": self.threads >= 0}
        bad = [name for name, ok in checks.items() if not ok]
        if bad:
            raise ConfigError(f"invalid numeric parameters: {', '.join(bad)}", {name: getattr(self, name) for name in bad})
        if self.mode not in ("advisory", "strict"):
            raise ConfigError(f"mode must be 'advisory' or 'strict', got '{self.mode}'", {"mode": self.mode})
        spec_from_dict(self.function)

    def spec(self) -> FunctionSpec:
        return spec_from_dict(self.function)

    def schedule(self) -> List[float]:
        return default_schedule(self.R_start, self.R_factor, self.R_steps)

    def hashed_fields(self) -> Dict[str, Any]:
        """Everything that determines results; output location and thread count are excluded."""
        data = asdict(self)
        data.pop("out_dir")
        data.pop("threads")
        return data


def load_run_config(path: str, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"configuration file not found: {path}", {"path": path}) from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed JSON in {path}: {e.msg} (line {e.lineno})", {"path": path}) from e
    if isinstance(data, dict) and overrides:
        data.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig.from_dict(data)


def _out(config: RunConfig, name: str) -> str:
    return os.path.join(config.out_dir, name)


# --- covering search ---

def _covering_markers(certificate: CoveringCertificate) -> Dict[str, complex]:
    markers: Dict[str, complex] = {}
    if certificate.witnesses is not None:
        markers["w_M"] = certificate.witnesses.w_M
        markers["w_m"] = certificate.witnesses.w_m
    alpha = certificate.details.get("alpha")
    if alpha is not None:
        markers["alpha"] = complex(alpha[0], alpha[1])
    return markers


def run_covering_search(config: RunConfig, trace: TraceLog):
    return find_self_covering_V(config.spec(), config.N, config.schedule(), d=config.d, mode=config.mode,
                                threads=resolve_threads(config.threads), trace=trace, seed=config.seed)


def cmd_covering_search(config: RunConfig) -> int:
    meta = artifact_meta(config.hashed_fields())
    trace = TraceLog()
    result = run_covering_search(config, trace)
    save_json(_out(config, "trace.json"), {"trace": trace.to_list()}, meta)
    if isinstance(result, BudgetExhausted):
        save_json(_out(config, "certificate.json"), result.to_dict(), meta)
        last = trace.messages()[-1] if len(trace) else "empty schedule"
        print(f"BudgetExhausted: no certificate for N={config.N} over {len(result.schedule)} radii ({last})")
        return EXIT_NEGATIVE

    payload = {"status": "Certificate", **result.to_dict(), "grid": result.grid_report.to_dict(),
               "refined_grid": result.self_inclusion_evidence.to_dict()}
    save_json(_out(config, "certificate.json"), payload, meta)
    save_svg(_out(config, "domain.svg"), render_domain_svg(result.V, meta, _covering_markers(result)))
    save_svg(_out(config, "heatmap.svg"), render_heatmap_svg(result.self_inclusion_evidence, meta))
    print(f"Certificate: case {result.case_tag}, N={result.N}, R={result.R:g}, V={result.V.domain_id}, "
          f"min count {result.self_inclusion_evidence.min_count}")
    return EXIT_OK


# --- entropy ---

def _compact_set(section: Dict[str, Any]) -> CompactSet:
    kind = section.get("kind")
    try:
        if kind == "circle":
            center = section.get("center", [0.0, 0.0])
            return unit_circle_set(int(section.get("samples", 2 ** 14)), float(section.get("radius", 1.0)),
                                   complex(center[0], center[1]))
        if kind == "domain":
            return domain_set(PlanarDomain.from_dict(section["domain"]), float(section["step"]))
    except (KeyError, TypeError, ValueError, IndexError) as e:
        raise ConfigError(f"invalid compact set description: {e}", {"kind": kind}) from e
    raise ConfigError(f"unknown compact set kind '{kind}'", {"kind": kind})


def _entropy_curve(config: RunConfig, meta: Dict[str, str]) -> Dict[str, Any]:
    section = config.entropy
    X = _compact_set(section["compact_set"])
    n_max = int(section.get("n_max", 12))
    deltas = [float(d) for d in section.get("deltas", [0.05])]
    if n_max < 2 or not deltas or any(d <= 0 for d in deltas):
        raise ConfigError("entropy needs n_max >= 2 and positive deltas", {"n_max": n_max, "deltas": deltas})
    estimate = entropy_lower_curve(config.spec(), X, n_max, deltas)
    save_csv(_out(config, "entropy.csv"), [["n", "delta", "K_lower"]] + estimate.csv_rows(), meta)
    reference = section.get("reference")
    save_svg(_out(config, "curve.svg"),
             render_curve_svg(estimate.curve, meta, f"{X.set_id}: h_lower={estimate.h_lower:.4f}", reference))
    return {"compact_set": X.to_dict(), "estimate": estimate.to_dict(), "trend": entropy_trend(estimate)}


def _certificate_bound(config: RunConfig) -> Dict[str, Any]:
    section = config.certificate_bound
    trace = TraceLog()
    result = run_covering_search(config, trace)
    if isinstance(result, BudgetExhausted):
        return {"status": "BudgetExhausted", "trace": trace.to_list()}
    spec = config.spec()
    m, k = int(section.get("m", 2)), int(section.get("k", 2))
    params = prepare_backward_orbit_params(spec, result.V, result.R, m, k, seed=config.seed,
                                           branch_cap=section.get("branch_cap"))
    bound = certificate_entropy_bound(spec, result, params, threads=resolve_threads(config.threads))
    return {"status": "Bound", "certificate": result.to_dict(), "bound": bound.to_dict()}


def cmd_entropy(config: RunConfig) -> int:
    if not config.entropy.get("compact_set") and not config.certificate_bound:
        raise ConfigError("entropy needs entropy.compact_set or a certificate_bound section", {})
    meta = artifact_meta(config.hashed_fields())
    payload: Dict[str, Any] = {}
    summary: List[str] = []
    status = EXIT_OK
    if config.entropy.get("compact_set"):
        payload["curve"] = _entropy_curve(config, meta)
        summary.append(f"h_lower={payload['curve']['estimate']['h_lower']:.4f}")
    if config.certificate_bound:
        payload["certificate_bound"] = _certificate_bound(config)
        if payload["certificate_bound"]["status"] == "BudgetExhausted":
            summary.append("certificate: BudgetExhausted")
            status = EXIT_NEGATIVE
        else:
            bound = payload["certificate_bound"]["bound"]
            summary.append(f"certificate bound={bound['measured']:.4f} (floor {bound['floor']:.4f})")
    save_json(_out(config, "entropy.json"), payload, meta)
    print("Entropy: " + ", ".join(summary))
    return status


# --- example product ---

def _zero_count_below(spec: LacunaryProduct, R: float) -> int:
    return int(np.sum(np.abs(spec.zeros) < R))


def _sample_targets(rng: np.random.Generator, r_in: float, r_out: float, count: int) -> np.ndarray:
    radius = np.sqrt(rng.uniform(r_in ** 2, r_out ** 2, count))
    return radius * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, count))


def _example_radii(spec: LacunaryProduct) -> List[float]:
    moduli = list(np.abs(spec.zeros))
    if spec.tail_zeros_lower_modulus is not None:
        moduli.append(spec.tail_zeros_lower_modulus)
    if len(moduli) < 2:
        return [10.0 * max(moduli + [1.0])]
    return [float(math.sqrt(a * b)) for a, b in zip(moduli, moduli[1:])]


def _disk_entropy_bound(config: RunConfig, spec: LacunaryProduct, R: float, i: int,
                        crit: CriticalData) -> Dict[str, Any]:
    """Backward orbit bound inside the certified disk Delta(0, R), next to its floor."""
    section = config.example
    m, k = int(section.get("bound_m", 1)), int(section.get("bound_k", 2))
    threads = resolve_threads(config.threads)
    try:
        certificate = disk_certificate(spec, R, i, threads)
        params = prepare_backward_orbit_params(spec, certificate.V, R, m, k, critical=crit, seed=config.seed,
                                               branch_cap=section.get("branch_cap"))
        bound = certificate_entropy_bound(spec, certificate, params, threads=threads)
    except ToolkitError as error:
        logging.warning(f"example product R={R:g}: no certificate bound ({error.__class__.__name__}: {error})")
        return {"status": error.__class__.__name__, "error": error.to_dict()}
    return {"status": "Bound", "measured": bound.measured, "floor": bound.floor, "m": m, "k": k,
            "count": bound.count.count, "meets_floor": bound.count.meets_floor}


def cmd_example_product(
config: RunConfig) -> int:
    spec = config.spec()
    if not isinstance(spec, LacunaryProduct):
        raise ConfigError("example-product needs a 'product' function", {"kind": config.function.get("kind")})
    section = config.example
    samples = int(section.get("samples", 24))
    m = int(section.get("m", 8))
    radii = [float(r) for r in section.get("radii", _example_radii(spec))]
    if samples < 1 or m < 1 or not radii or any(r <= 1 for r in radii):
        raise ConfigError("example needs samples >= 1, m >= 1 and radii above 1", {"radii": radii})
    meta = artifact_meta(config.hashed_fields())
    rng = np.random.default_rng(config.seed)

    rows: List[Dict[str, Any]] = []
    try:
        for R in radii:
            i = _zero_count_below(spec, R)
            big = PlanarDomain(Disk(0j, 2.0 * R), simply_connected_flag=True, domain_id=f"disk[r={2.0 * R:g}]")
            small = PlanarDomain(Disk(0j, R / 2.0), simply_connected_flag=True, domain_id=f"disk[r={R / 2.0:g}]")
            disk = PlanarDomain(Disk(0j, R), simply_connected_flag=True, domain_id=f"disk[r={R:g}]")
            diffs = [count_preimages(spec, big, w).count - count_preimages(spec, small, w).count
                     for w in _sample_targets(rng, R / 2.0, 2.0 * R, samples)]
            boundary_ratio = float(np.min(scan_circle(spec, R).log_modulus)) - math.log(R)
            row: Dict[str, Any] = {"R": R, "i": i, "annulus_max_difference": max(diffs),
                                   "log_min_boundary_ratio": boundary_ratio}
            if boundary_ratio > 0:
                counts = [count_preimages(spec, disk, w).count for w in _sample_targets(rng, 0.0, R, samples)]
                row["disk_counts"] = sorted(set(counts))
                row["disk_exact"] = all(c == i for c in counts)
                if i >= 1:
                    crit = critical_data(spec, disk)
                    row["degree_product"] = crit.degree_product
                    row["entropy_floor"] = example_product_entropy_floor(i)
                    row["certificate_floor"] = theoretical_entropy_floor(i, crit.degree_product, m)
                    if row["disk_exact"]:
                        row["certificate_bound"] = _disk_entropy_bound(config, spec, R, i, crit)
            else:
                row["disk_exact"] = None
            logging.info(f"example product R={R:g}: i={i}, annulus difference {max(diffs)}, disk {row['disk_exact']}")
            rows.append(row)
    except ToolkitError as error:
        save_json(_out(config, "example.json"), {"status": error.__class__.__name__, "error": error.to_dict(),
                                                 "rows": rows}, meta)
        print(f"Example product: {error.__class__.__name__}: {error}")
        return EXIT_NEGATIVE

    checked = [row for row in rows if row["disk_exact"] is not None]
    floors = [row["entropy_floor"] for row in checked if "entropy_floor" in row]
    bounds = [row["certificate_bound"]["measured"] for row in checked
              if row.get("certificate_bound", {}).get("status") == "Bound"]
    verdicts = {
        "annulus_at_most_once": all(row["annulus_max_difference"] <= 1 for row in rows),
        "disk_i_fold": bool(checked) and all(row["disk_exact"] for row in checked),
        "entropy_floor": max(floors) if floors else None,
        "certificate_bound": max(bounds) if bounds else None,
    }
    save_json(_out(config, "example.json"), {"status": "Checked", "verdicts": verdicts, "rows": rows}, meta)
    print(f"Example product: annulus at most once {verdicts['annulus_at_most_once']}, "
          f"disk i-fold {verdicts['disk_i_fold']}, entropy floor {verdicts['entropy_floor']}, "
          f"certificate bound {verdicts['certificate_bound']}")
    return EXIT_OK
