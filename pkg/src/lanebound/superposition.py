"""Reference paths as pointwise blends of a boundary pair."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ProfileError
from .geometry import cum_arclength, sample_at_arclengths


@dataclass
class SuperPath:
    """A blended reference path with precomputed cumulative arc length."""

    points: np.ndarray
    cum: np.ndarray

    def __len__(self) -> int:
        return len(self.points)

    @property
    def length(self) -> float:
        return float(self.cum[-1])


def check_weights(weights, n: int) -> np.ndarray:
    """Validate a weight profile: length n, every value in [0, 1]."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or len(w) != n:
        raise ProfileError(f"weight profile must have length {n}, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise ProfileError("weight profile contains a non-finite value")
    if np.any(w < 0.0) or np.any(w > 1.0):
        raise ProfileError("weight profile values must lie in [0, 1]")
    return w


def superimpose(boundary, weights) -> SuperPath:
    """Blend corresponding boundary points: w * left + (1 - w) * right.

    w = 1 follows the left edge, w = 0 the right edge. Every path point lies
    on the chord between its boundary point pair, so the path cannot leave
    the corridor.
    """
    left = np.asarray(boundary.left, dtype=float)
    right = np.asarray(boundary.right, dtype=float)
    w = check_weights(weights, len(left))[:, None]
    points = w * left + (1.0 - w) * right
    return SuperPath(points=points, cum=cum_arclength(points))


def point_at_arclength(path: SuperPath, s: float) -> np.ndarray:
    """Point at arc length s along the path, clamped to its ends."""
    s = float(np.clip(s, 0.0, path.cum[-1]))
    x = np.interp(s, path.cum, path.points[:, 0])
    y = np.interp(s, path.cum, path.points[:, 1])
    return np.array([x, y])
