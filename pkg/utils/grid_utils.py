"""
utils/grid_utils.py

Deterministic lattices and random streams shared by the geometry, winding and
entropy modules.

Functions:
- lattice_points: Points k*step of the square lattice inside a bounding box, with
  their integer grid indices, in row-major grid order.
- box_contour: Counterclockwise closed polyline around an axis-parallel box.
- circle_points: Uniform samples on a circle.
- spawn_generators: Independent numpy generators split from one seed.

Dependencies:
- numpy: For vectorised lattice construction and random streams.

Author: Dynamics Toolkit Team
Last updated: 2026-10-18
"""

import math
from typing import List, Tuple

import numpy as np


def lattice_points(xmin: float, xmax: float, ymin: float, ymax: float, step: float) -> Tuple[np.ndarray, np.ndarray]:
    """Returns lattice points k*step (k integer) inside the closed box.

    Args:
        xmin, xmax, ymin, ymax (float): Bounding box.
        step (float): Lattice spacing, > 0.

    Returns:
        Tuple[np.ndarray, np.ndarray]: complex points and an (n, 2) int array of
        (row, column) grid indices. Points are ordered by (row, column), so any
        subset filtered from them stays sorted by grid index.
    """
    if step <= 0:
        raise ValueError(f"lattice step must be positive, got {step}")
    i0, i1 = math.ceil(xmin / step), math.floor(xmax / step)
    j0, j1 = math.ceil(ymin / step), math.floor(ymax / step)
    if i1 < i0 or j1 < j0:
        return np.zeros(0, dtype=complex), np.zeros((0, 2), dtype=int)
    cols = np.arange(i0, i1 + 1)
    rows = np.arange(j0, j1 + 1)
    jj, ii = np.meshgrid(rows, cols, indexing="ij")
    points = (ii * step) + 1j * (jj * step)
    index = np.stack([jj.ravel(), ii.ravel()], axis=1)
    return points.ravel(), index


def box_contour(center: complex, half_width: float, half_height: float, points_per_side: int = 8) -> np.ndarray:
    """Counterclockwise closed polyline (last point not repeated) around a box."""
    n = max(int(points_per_side), 1)
    t = np.arange(n) / n
    x0, x1 = center.real - half_width, center.real + half_width
    y0, y1 = center.imag - half_height, center.imag + half_height
    bottom = (x0 + t * (x1 - x0)) + 1j * y0
    right = x1 + 1j * (y0 + t * (y1 - y0))
    top = (x1 - t * (x1 - x0)) + 1j * y1
    left = x0 + 1j * (y1 - t * (y1 - y0))
    return np.concatenate([bottom, right, top, left])


def circle_points(center: complex, radius: float, samples: int, phase: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
    """Returns (angles, points) of `samples` uniform points on a circle."""
    angles = phase + 2.0 * np.pi * np.arange(samples) / samples
    return angles, center + radius * np.exp(1j * angles)


def spawn_generators(seed: int, count: int) -> List[np.random.Generator]:
    """Splits one seed into `count` independent generators.

    Trial t always receives the same stream, so serial and parallel Monte-Carlo
    runs agree.
    """
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.default_rng(child) for child in children]
