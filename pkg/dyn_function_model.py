"""
dyn_function_model.py

Symbolic entire functions with controlled evaluation error.

Every function the toolkit works with is described by a small data class that
knows how to evaluate f, f' and log f on numpy arrays, how large its evaluation
error can be, and how to serialise itself. Four families are supported:
exp(a*z + b), polynomials, truncated Taylor models valid on a disk, and lacunary
products prod (z_i - z)/z_i with a certified tail.

Main Classes:
- FunctionSpec: Base class of the four families (raises NotImplementedError).
- ExpAffine, Polynomial, TaylorTruncated, LacunaryProduct: The families.
- DerivativeSpec: f' of any family, used for critical-point searches.
- CircleWitness: A point on |z| = R together with |f| there.

Main Functions:
- evaluate, derivative, evaluate_with_bound: Point evaluation with error contract.
- scan_circle: Uniform angular scan of log|f| on a circle.
- max_modulus_on_circle, small_modulus_witness: Circle witnesses w_M and w_m.
- product_tail_bound: Relative tail estimate of a truncated lacunary product.
- spec_from_dict, spec_to_dict: JSON codec ({"kind": ..., complex as [re, im]}).

Dependencies:
- numpy: Vectorised evaluation.
- scipy: Bounded scalar refinement of circle extrema.

Usage:
    spec = spec_from_dict({"kind": "exp", "a": [1, 0], "b": [0, 0]})
    witness = max_modulus_on_circle(spec, 3.0)

Author: Dynamics Toolkit Team
Last updated: 2026-10-18
"""

from __future__ import annotations

import math
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import minimize_scalar

from dyn_settings import CIRCLE_SAMPLES
from utils.errors import ConfigError, OutOfValidity, TailTooClose
from utils.grid_utils import circle_points

ComplexLike = Union[complex, float, np.ndarray]


def _as_complex_array(z: ComplexLike) -> np.ndarray:
    return np.asarray(z, dtype=complex)


def _scalar_or_array(value: np.ndarray, like: ComplexLike):
    if np.ndim(like) == 0:
        return complex(value) if np.iscomplexobj(value) else float(value)
    return value


def encode_complex(value: complex) -> List[float]:
    value = complex(value)
    return [value.real, value.imag]


def decode_complex(raw: Any) -> complex:
    """Reads a complex number stored as [re, im] (plain numbers are accepted too)."""
    if isinstance(raw, (list, tuple)) and len(raw) == 2:
        return complex(float(raw[0]), float(raw[1]))
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return complex(raw)
    raise ConfigError(f"cannot read complex number from {raw!r}", {"value": repr(raw)})


class FunctionSpec:
    """Base class for symbolic entire functions.

    Subclasses implement `value`, `derivative_value` and `log_value` on numpy
    arrays; the public `evaluate`/`derivative` wrappers add the validity check
    and scalar unwrapping.
    """

    kind = "abstract"

    @property
    def validity_radius(self) -> float:
        return math.inf

    @property
    def polynomial_degree(self) -> Optional[int]:
        """Degree when the model is a genuine polynomial, None for transcendental models."""
        return None

    # --- raw vectorised evaluation ---
    def value(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def derivative_value(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def log_value(self, z: np.ndarray) -> np.ndarray:
        """A complex logarithm of f(z); the imaginary part is only meaningful modulo 2*pi."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(self.value(z))

    def log_derivative_value(self, z: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(self.derivative_value(z))

    def error_bound(self, z: np.ndarray) -> np.ndarray:
        """Absolute evaluation error bound of the model at z (0 for exact families)."""
        return np.zeros(np.shape(z))

    def derivative_error_bound(self, z: np.ndarray) -> np.ndarray:
        return np.zeros(np.shape(z))

    def to_dict(self) -> Dict[str, Any]:
        raise NotImplementedError

    # --- checked public API ---
    def check_validity(self, z: ComplexLike) -> None:
        radius = self.validity_radius
        if math.isinf(radius):
            return
        modulus = np.abs(_as_complex_array(z))
        if modulus.size and float(np.max(modulus)) > radius * (1.0 + 1e-12):
            raise OutOfValidity(
                f"|z| = {float(np.max(modulus)):.6g} exceeds validity radius {radius:.6g}",
                {"kind": self.kind, "validity_radius": radius, "max_modulus": float(np.max(modulus))},
            )

    def evaluate(self, z: ComplexLike):
        self.check_validity(z)
        return _scalar_or_array(self.value(_as_complex_array(z)), z)

    def derivative(self, z: ComplexLike):
        self.check_validity(z)
        return _scalar_or_array(self.derivative_value(_as_complex_array(z)), z)

    def log_modulus(self, z: ComplexLike):
        self.check_validity(z)
        return _scalar_or_array(np.real(self.log_value(_as_complex_array(z))), z)

    def derivative_spec(self) -> "FunctionSpec":
        return DerivativeSpec(self)

    def label(self) -> str:
        return self.kind


@dataclass(eq=False)
class ExpAffine(FunctionSpec):
    """z -> exp(a*z + b)."""

    a: complex = 1.0
    b: complex = 0.0
    kind = "exp"

    def __post_init__(self):
        self.a = complex(self.a)
        self.b = complex(self.b)

    def value(self, z):
        with np.errstate(over="ignore"):
            return np.exp(self.a * z + self.b)

    def derivative_value(self, z):
        with np.errstate(over="ignore"):
            return self.a * np.exp(self.a * z + self.b)

    def log_value(self, z):
        return self.a * _as_complex_array(z) + self.b

    def log_derivative_value(self, z):
        if self.a == 0:
            return np.full(np.shape(z), -np.inf + 0j)
        return np.log(self.a) + self.a * _as_complex_array(z) + self.b

    def derivative_spec(self) -> FunctionSpec:
        if self.a == 0:
            return Polynomial([0.0])
        return ExpAffine(self.a, self.b + np.log(self.a))

    def to_dict(self):
        return {"kind": self.kind, "a": encode_complex(self.a), "b": encode_complex(self.b)}

    def label(self):
        return f"exp({self.a:g}*z + {self.b:g})"


@dataclass(eq=False)
class Polynomial(FunctionSpec):
    """Polynomial with ascending coefficients."""

    coeffs: Sequence[complex] = field(default_factory=lambda: [0.0, 1.0])
    kind = "poly"

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.size == 0:
            raise ValueError("polynomial needs at least one coefficient")
        if self.coeffs.size > 1 and self.coeffs[-1] == 0:
            raise ValueError("leading coefficient of a non-constant polynomial must be nonzero")

    @property
    def polynomial_degree(self) -> int:
        return int(self.coeffs.size - 1)

    def value(self, z):
        with np.errstate(over="ignore", invalid="ignore"):
            return npoly.polyval(z, self.coeffs)

    def derivative_value(self, z):
        if self.coeffs.size == 1:
            return np.zeros(np.shape(z), dtype=complex)
        with np.errstate(over="ignore", invalid="ignore"):
            return npoly.polyval(z, npoly.polyder(self.coeffs))

    def derivative_spec(self) -> FunctionSpec:
        if self.coeffs.size == 1:
            return Polynomial([0.0])
        return Polynomial(npoly.polyder(self.coeffs))

    def to_dict(self):
        return {"kind": self.kind, "coeffs": [encode_complex(c) for c in self.coeffs]}

    def label(self):
        return f"poly(deg {self.polynomial_degree})"


@dataclass(eq=False)
class TaylorTruncated(FunctionSpec):
    """Taylor polynomial of an entire function, valid on |z| <= validity_radius.

    The remainder f - P vanishes to order n = len(coeffs) at 0 and is bounded by
    tail_bound_coeff on the validity disk, so by the maximum principle applied to
    (f - P)/z^n the error at z is at most tail_bound_coeff * (|z|/rho)^n.
    """

    coeffs: Sequence[complex] = field(default_factory=lambda: [1.0])
    validity_radius: float = 1.0
    tail_bound_coeff: float = 0.0
    kind = "taylor"

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        self.validity_radius = float(self.validity_radius)
        if self.coeffs.size == 0:
            raise ValueError("Taylor model needs at least one coefficient")
        if self.validity_radius <= 0:
            raise ValueError("validity_radius must be positive")
        if self.tail_bound_coeff < 0:
            raise ValueError("tail_bound_coeff must be nonnegative")

    def value(self, z):
        return npoly.polyval(z, self.coeffs)

    def derivative_value(self, z):
        if self.coeffs.size == 1:
            return np.zeros(np.shape(z), dtype=complex)
        return npoly.polyval(z, npoly.polyder(self.coeffs))

    def error_bound(self, z):
        ratio = np.abs(z) / self.validity_radius
        return self.tail_bound_coeff * ratio ** self.coeffs.size

    def derivative_error_bound(self, z):
        # Cauchy estimate on the disk of radius rho - |z| around z
        gap = self.validity_radius - np.abs(z)
        with np.errstate(divide="ignore"):
            return np.where(gap > 0, self.tail_bound_coeff / np.maximum(gap, 1e-300), np.inf)

    def to_dict(self):
        return {
            "kind": self.kind,
            "coeffs": [encode_complex(c) for c in self.coeffs],
            "validity_radius": self.validity_radius,
            "tail_bound_coeff": self.tail_bound_coeff,
        }

    def label(self):
        return f"taylor(n={self.coeffs.size}, rho={self.validity_radius:g})"


@dataclass(eq=False)
class LacunaryProduct(FunctionSpec):
    """z -> prod_i (z_i - z)/z_i over the listed zeros, times an omitted tail.

    `tail_zeros_lower_modulus` is a lower bound for the moduli of the omitted
    zeros (None: the product is exact). The tail estimate assumes the omitted
    zeros at least double in modulus from one to the next.
    """

    zeros: Sequence[complex] = field(default_factory=list)
    tail_zeros_lower_modulus: Optional[float] = None
    kind = "product"

    def __post_init__(self):
        self.zeros = np.asarray(self.zeros, dtype=complex)
        moduli = np.abs(self.zeros)
        if np.any(moduli == 0):
            raise ValueError("lacunary product zeros must be nonzero")
        if moduli.size > 1 and np.any(np.diff(moduli) <= 0):
            raise ValueError("lacunary product zeros must be strictly increasing in modulus")
        if self.tail_zeros_lower_modulus is not None:
            self.tail_zeros_lower_modulus = float(self.tail_zeros_lower_modulus)
            if moduli.size and self.tail_zeros_lower_modulus <= moduli[-1]:
                raise ValueError("tail zeros must lie beyond the listed zeros")

    def _factors(self, z):
        z = _as_complex_array(z)
        return 1.0 - z[..., None] / self.zeros

    def log_value(self, z):
        z = _as_complex_array(z)
        if self.zeros.size == 0:
            return np.zeros(z.shape, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.sum(np.log(self._factors(z)), axis=-1)

    def value(self, z):
        with np.errstate(over="ignore"):
            return np.exp(self.log_value(z))

    def derivative_value(self, z):
        z = _as_complex_array(z)
        if self.zeros.size == 0:
            return np.zeros(z.shape, dtype=complex)
        factors = self._factors(z)
        total = np.zeros(z.shape, dtype=complex)
        with np.errstate(over="ignore", invalid="ignore"):
            for k in range(self.zeros.size):
                others = np.delete(factors, k, axis=-1)
                total = total - np.prod(others, axis=-1) / self.zeros[k]
        return total

    def product_tail_bound(self, R: float) -> float:
        """Relative tail estimate eps with |f_true/f_truncated - 1| <= exp(eps) - 1 on |z| <= R."""
        if self.tail_zeros_lower_modulus is None:
            return 0.0
        tail = self.tail_zeros_lower_modulus
        if tail <= 2.0 * R:
            raise TailTooClose(
                f"tail zeros at modulus {tail:.6g} are within 2R = {2.0 * R:.6g}",
                {"tail_zeros_lower_modulus": tail, "R": R},
            )
        q = R / tail
        return 2.0 * q / (1.0 - q)

    def _tail_eps(self, radius: np.ndarray) -> np.ndarray:
        """Elementwise product_tail_bound for an array of radii."""
        q = np.asarray(radius, dtype=float) / self.tail_zeros_lower_modulus
        if q.size and float(np.max(q)) >= 0.5:
            self.product_tail_bound(float(np.max(radius)))
        return 2.0 * q / (1.0 - q)

    def error_bound(self, z):
        z = _as_complex_array(z)
        if self.tail_zeros_lower_modulus is None:
            return np.zeros(z.shape)
        eps = self._tail_eps(np.abs(z))
        with np.errstate(over="ignore"):
            return np.abs(self.value(z)) * np.expm1(eps)

    def derivative_error_bound(self, z):
        z = _as_complex_array(z)
        if self.tail_zeros_lower_modulus is None:
            return np.zeros(z.shape)
        # Cauchy estimate on the circle of radius r = max(|z|, 1) around z
        r = np.maximum(np.abs(z), 1.0)
        rho = np.abs(z) + r
        envelope = np.prod(1.0 + rho[..., None] / np.abs(self.zeros), axis=-1) if self.zeros.size else np.ones(z.shape)
        return envelope * np.expm1(self._tail_eps(rho)) / r

    def to_dict(self):
        return {
            "kind": self.kind,
            "zeros": [encode_complex(c) for c in self.zeros],
            "tail_zeros_lower_modulus": self.tail_zeros_lower_modulus,
        }

    def label(self):
        return f"product(J={self.zeros.size})"


class DerivativeSpec(FunctionSpec):
    """f' of a Taylor model or lacunary product, treated as a function in its own right."""

    kind = "derivative"

    def __init__(self, parent: FunctionSpec):
        self.parent = parent

    @property
    def validity_radius(self) -> float:
        return self.parent.validity_radius

    def value(self, z):
        return self.parent.derivative_value(z)

    def derivative_value(self, z):
        z = _as_complex_array(z)
        h = 1e-6 * (1.0 + np.abs(z))
        return (self.parent.derivative_value(z + h) - self.parent.derivative_value(z - h)) / (2.0 * h)

    def error_bound(self, z):
        return self.parent.derivative_error_bound(z)

    def to_dict(self):
        return {"kind": self.kind, "of": self.parent.to_dict()}

    def label(self):
        return f"d/dz {self.parent.label()}"


@dataclass
class CircleWitness:
    """A point on |z| = circle_radius and the modulus of its image."""

    point: complex
    modulus_of_image: float
    circle_radius: float
    log_modulus: float

    @property
    def angle(self) -> float:
        return float(np.angle(self.point)) % (2.0 * np.pi)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "point": encode_complex(self.point),
            "modulus_of_image": self.modulus_of_image if math.isfinite(self.modulus_of_image) else None,
            "log_modulus": self.log_modulus if math.isfinite(self.log_modulus) else None,
            "circle_radius": self.circle_radius,
        }


@dataclass
class CircleScan:
    """log|f| sampled at uniform angles on |z| = radius."""

    radius: float
    angles: np.ndarray
    points: np.ndarray
    log_modulus: np.ndarray


# --- module-level operations ---

def evaluate(spec: FunctionSpec, z: ComplexLike):
    return spec.evaluate(z)


def derivative(spec: FunctionSpec, z: ComplexLike):
    return spec.derivative(z)


def evaluate_with_bound(spec: FunctionSpec, z: ComplexLike) -> Tuple[Any, Any]:
    """Returns (f(z), absolute error bound) for any family."""
    spec.check_validity(z)
    arr = _as_complex_array(z)
    return _scalar_or_array(spec.value(arr), z), _scalar_or_array(np.asarray(spec.error_bound(arr), dtype=float), z)


def scan_circle(spec: FunctionSpec, R: float, samples: int = CIRCLE_SAMPLES) -> CircleScan:
    if R <= 0:
        raise ValueError(f"circle radius must be positive, got {R}")
    spec.check_validity(R)
    angles, points = circle_points(0j, R, samples)
    return CircleScan(R, angles, points, np.real(spec.log_value(points)))


def _refine_angle(spec: FunctionSpec, R: float, scan: CircleScan, index: int, sign: float) -> Tuple[float, float]:
    """Bounded scalar refinement of sign*log|f| around a sampled extremum.

    Returns (angle, log_modulus); the sample itself wins ties so results stay
    reproducible.
    """
    theta0 = float(scan.angles[index])
    best = float(scan.log_modulus[index])
    if not math.isfinite(best):
        return theta0, best
    step = 2.0 * np.pi / scan.angles.size

    def objective(t: float) -> float:
        lm = float(np.real(spec.log_value(np.asarray(R * np.exp(1j * t)))))
        return -sign * lm

    result = minimize_scalar(objective, bounds=(theta0 - step, theta0 + step), method="bounded",
                             options={"xatol": 1e-12 * max(1.0, step)})
    refined = -sign * float(result.fun)
    if math.isfinite(refined) and sign * refined > sign * best:
        return float(result.x) % (2.0 * np.pi), refined
    return theta0, best


def _witness(R: float, angle: float, log_modulus: float) -> CircleWitness:
    modulus = math.exp(log_modulus) if log_modulus < 709.0 else math.inf
    return CircleWitness(complex(R * np.exp(1j * angle)), modulus, R, log_modulus)


def max_modulus_on_circle(spec: FunctionSpec, R: float, samples: int = CIRCLE_SAMPLES) -> CircleWitness:
    """Point of (near) maximal |f| on |z| = R: uniform scan, lowest angle on ties, then refinement."""
    scan = scan_circle(spec, R, samples)
    index = int(np.argmax(scan.log_modulus))
    angle, lm = _refine_angle(spec, R, scan, index, +1.0)
    return _witness(R, angle, lm)


def small_modulus_witness(spec: FunctionSpec, R: float, bound: float,
                          samples: int = CIRCLE_SAMPLES) -> Optional[CircleWitness]:
    """Point on |z| = R with |f| < bound, or None when the scan finds none."""
    if bound <= 0:
        raise ValueError(f"bound must be positive, got {bound}")
    scan = scan_circle(spec, R, samples)
    index = int(np.argmin(scan.log_modulus))
    angle, lm = _refine_angle(spec, R, scan, index, -1.0)
    if lm < math.log(bound):
        return _witness(R, angle, lm)
    logging.debug(f"No |f| < {bound:.4g} on |z| = {R:.4g} (min log|f| = {lm:.4g})")
    return None


def product_tail_bound(spec: LacunaryProduct, R: float) -> float:
    return spec.product_tail_bound(R)


def spec_from_dict(data: Dict[str, Any]) -> FunctionSpec:
    """Builds a FunctionSpec from its JSON object."""
    if not isinstance(data, dict) or "kind" not in data:
        raise ConfigError("function description must be an object with a 'kind' field", {"value": repr(data)})
    kind = data["kind"]
    try:
        if kind == "exp":
            return ExpAffine(decode_complex(data.get("a", 1.0)), decode_complex(data.get("b", 0.0)))
        if kind == "poly":
            return Polynomial([decode_complex(c) for c in data["coeffs"]])
        if kind == "taylor":
            return TaylorTruncated([decode_complex(c) for c in data["coeffs"]],
                                   float(data["validity_radius"]), float(data.get("tail_bound_coeff", 0.0)))
        if kind == "product":
            tail = data.get("tail_zeros_lower_modulus")
            return LacunaryProduct([decode_complex(c) for c in data["zeros"]],
                                   None if tail is None else float(tail))
        if kind == "derivative":
            return DerivativeSpec(spec_from_dict(data["of"]))
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"invalid '{kind}' function description: {e}", {"kind": kind}) from e
    raise ConfigError(f"unknown function kind '{kind}'", {"kind": kind})


def spec_to_dict(spec: FunctionSpec) -> Dict[str, Any]:
    return spec.to_dict()
