"""
utils/errors.py

Exception hierarchy shared by every toolkit module.

Main Classes:
- ToolkitError: Base class; carries a message and a JSON-ready details dict.
- One subclass per failure the pipeline distinguishes (model validity, geometry,
  winding counts, covering certification, entropy enumeration, configuration).

Honest negatives such as "no witness on this circle" are values, not errors;
only conditions that stop the current computation are raised.

Author: Dynamics Toolkit Team
Last updated: 2026-10-18
"""

from typing import Any, Dict, Optional


class ToolkitError(Exception):
    """Base class for all toolkit errors."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {"error": type(self).__name__, "message": self.message, "details": self.details}


# --- function models ---
class OutOfValidity(ToolkitError):
    """Point lies outside the region where the function model is valid."""


class TailTooClose(ToolkitError):
    """Omitted zeros of a lacunary product are too close to the evaluation radius."""


# --- domains ---
class DegenerateDomain(ToolkitError):
    """The described region is empty or has no usable boundary."""


class WitnessTooClose(ToolkitError):
    """Witness points violate the separation required by the first-case construction."""


class SeparationViolated(ToolkitError):
    """Points violate the separation required by the second-case construction."""


# --- hyperbolic estimates ---
class BelowThreshold(ToolkitError):
    """Density bound requested where it is not guaranteed (|z| <= e^5)."""


class HypothesisFailed(ToolkitError):
    """A strict inequality required by a growth estimate does not hold."""


class NotSimplyConnected(ToolkitError):
    """Domain has more than one boundary contour."""


class Disconnected(ToolkitError):
    """No grid path joins the requested points."""


# --- winding counts ---
class OnTarget(ToolkitError):
    """An image point coincides with the target value."""


class NeedsRefinement(ToolkitError):
    """A single argument increment exceeds the admissible step."""


class BoundaryHit(ToolkitError):
    """The target is (numerically) attained on the boundary."""


class RefinementBudgetExceeded(ToolkitError):
    """Adaptive contour refinement ran out of edges."""


class MarginTooSmall(ToolkitError):
    """Boundary modulus bound could not be certified for a Rouché transfer."""


# --- covering search ---
class PreconditionViolated(ToolkitError):
    """Operation called without its documented precondition."""


class Inconclusive(ToolkitError):
    """A zero-count candidate exists but N-fold covering could not be verified."""


class CertificationFailed(ToolkitError):
    """A covering certificate could not be produced; `constraint` names the failing check."""

    def __init__(self, message: str, constraint: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details)
        self.constraint = constraint

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["constraint"] = self.constraint
        return data


class NotEnoughPreimages(ToolkitError):
    """No non-exceptional test value has N preimages at this radius."""


# --- entropy ---
class SubdivisionBudgetExceeded(ToolkitError):
    """Quadtree subdivision ran out of boxes."""


class EnumerationBudgetExceeded(ToolkitError):
    """Backward-orbit enumeration ran out of nodes."""


# --- configuration ---
class ConfigError(ToolkitError):
    """Run configuration is malformed or incomplete."""
