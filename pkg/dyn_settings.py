"""
dyn_settings.py

Central configuration for the Self-Covering Dynamics Toolkit.

All numeric knobs of the pipeline (circle scans, R schedules, contour resolution,
grid steps, enumeration budgets, output locations) are read from the environment
with sensible defaults, so a `.env` file next to the entry script is enough to
retune a run without touching code.

Main Constants:
- TOOLKIT_VERSION: Version string embedded in every artifact.
- CIRCLE_SAMPLES: Angular samples for circle scans.
- R_START, R_FACTOR, R_STEPS: Default geometric radius schedule.
- J_MIN, WORKING_D, HYPOTHESES_MODE: Growth exponent floor, working hyperbolic
  constant (measured when unset) and whether the dichotomy hypotheses gate the search.
- D_TRIALS, D_MARGIN: Random configurations per measurement of d and the factor
  applied to their largest witness distance.
- CONTOUR_EDGE_DIVISIONS, ARG_STEP_LIMIT, REFINEMENT_EDGE_BUDGET, BOUNDARY_GAP_TOL:
  Winding-count resolution and budgets.
- DICHOTOMY_GRID_DIVISIONS, SUBLEVEL_GRID_DIVISIONS: Grid steps as fractions of R.
- PERIOD_BUDGET, ENUMERATION_BUDGET: Entropy module budgets.
- OUTPUT_DIR, DEFAULT_SEED, THREADS, LOG_LEVEL: Run plumbing.

Dependencies:
- python-dotenv: For loading environment variables.

Usage:
    from dyn_settings import CIRCLE_SAMPLES, R_START

Author: Dynamics Toolkit Team
Last updated: 2026-10-18
"""

import os
import math
from pathlib import Path

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv(dotenv_path=Path(__file__).parent / ".env")

TOOLKIT_VERSION = "1.0.0"

# --- function models ---
CIRCLE_SAMPLES = int(os.getenv("CIRCLE_SAMPLES", "4096"))

# --- R schedule ---
R_START = float(os.getenv("R_START", "64"))
R_FACTOR = float(os.getenv("R_FACTOR", "2"))
R_STEPS = int(os.getenv("R_STEPS", "20"))

# --- covering dichotomy ---
J_MIN = int(os.getenv("J_MIN", "2"))
# empty means the working d is measured once per search
_WORKING_D = os.getenv("WORKING_D", "").strip()
WORKING_D = float(_WORKING_D) if _WORKING_D else None
D_TRIALS = int(os.getenv("D_TRIALS", "4"))
D_MARGIN = float(os.getenv("D_MARGIN", "2.0"))
HYPOTHESES_MODE = os.getenv("HYPOTHESES_MODE", "advisory").strip().lower()
NONRECURRENCE_SAMPLES = int(os.getenv("NONRECURRENCE_SAMPLES", "9"))

# --- domains ---
SLIT_HALFWIDTH_FACTOR = float(os.getenv("SLIT_HALFWIDTH_FACTOR", "1e-6"))
CONTOUR_EDGE_DIVISIONS = int(os.getenv("CONTOUR_EDGE_DIVISIONS", "64"))

# --- winding counts ---
ARG_STEP_LIMIT = float(os.getenv("ARG_STEP_LIMIT", str(math.pi / 2)))
REFINEMENT_EDGE_BUDGET = int(os.getenv("REFINEMENT_EDGE_BUDGET", str(2 ** 20)))
BOUNDARY_GAP_TOL = float(os.getenv("BOUNDARY_GAP_TOL", "1e-9"))

# --- grids ---
DICHOTOMY_GRID_DIVISIONS = int(os.getenv("DICHOTOMY_GRID_DIVISIONS", "8"))
SUBLEVEL_GRID_DIVISIONS = int(os.getenv("SUBLEVEL_GRID_DIVISIONS", "200"))
QUASIHYPERBOLIC_GRID_DIVISIONS = int(os.getenv("QUASIHYPERBOLIC_GRID_DIVISIONS", "24"))

# --- entropy ---
PERIOD_BUDGET = int(os.getenv("PERIOD_BUDGET", "64"))
ENUMERATION_BUDGET = int(os.getenv("ENUMERATION_BUDGET", "2000000"))
SUBDIVISION_BUDGET = int(os.getenv("SUBDIVISION_BUDGET", "20000"))

# --- run plumbing ---
OUTPUT_DIR = os.getenv("OUTPUT_DIR", "outputs")
DEFAULT_SEED = int(os.getenv("DEFAULT_SEED", "0"))
THREADS = int(os.getenv("THREADS", "0"))
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()


def resolve_threads(threads: int = THREADS) -> int:
    """Maps the THREADS knob to a worker count (0 means all logical cores)."""
    if threads and threads > 0:
        return threads
    return os.cpu_count() or 1
