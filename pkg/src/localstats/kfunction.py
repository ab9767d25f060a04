"""
Local and global K-functions with translation edge correction.

Each local function is scaled by 1/rho with the stationary plug-in
rho = n/|W|, so that the mean of the local functions is the usual
translation-corrected global estimator and its Poisson benchmark is pi r^2.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from src.core import ObservationWindow, PointPattern
from src.errors import (
    GridMismatchError,
    InsufficientPointsError,
    NoDataError,
    ParameterError,
    UndefinedWeightError,
)

logger = logging.getLogger(__name__)

DEFAULT_RADIUS_COUNT = 100


# =============================================================================
# Radius grid
# =============================================================================

@dataclass(frozen=True, eq=False)
class RadiusGrid:
    """
    Strictly increasing radii [r0, ..., r_max].

    r0 = 0 is accepted so the metric discrepancies can integrate from the
    origin; the normalised exponential discrepancy rejects it.
    """

    r_values: np.ndarray

    def __post_init__(self):
        r = np.array(self.r_values, dtype=float).reshape(-1)
        if r.size < 2:
            raise ParameterError('r_values', r.tolist(), "at least 2 radii")
        if not np.all(np.isfinite(r)) or r[0] < 0:
            raise ParameterError('r_values', float(r[0]), "finite, nonnegative radii")
        if not np.all(np.diff(r) > 0):
            raise ParameterError('r_values', r.tolist()[:5], "strictly increasing radii")
        r.setflags(write=False)
        object.__setattr__(self, 'r_values', r)

    @classmethod
    def linear(cls, r0: float, r_max: float, count: int = DEFAULT_RADIUS_COUNT) -> "RadiusGrid":
        if count < 2:
            raise ParameterError('radius_count', count, ">= 2")
        if not r_max > r0:
            raise ParameterError('r_max', r_max, f"r_max > r0 ({r0})")
        return cls(np.linspace(r0, r_max, int(count)))

    @classmethod
    def default_for(
        cls,
        window: ObservationWindow,
        count: int = DEFAULT_RADIUS_COUNT,
        r_max: Optional[float] = None,
        r0: Optional[float] = None,
    ) -> "RadiusGrid":
        """
        Default grid: r_max = shorter side / 4, r0 = r_max / 100, `count` equally spaced radii.
        """
        r_max = min(window.width, window.height) / 4.0 if r_max is None else float(r_max)
        r0 = r_max / 100.0 if r0 is None else float(r0)
        return cls.linear(r0, r_max, count)

    @property
    def r0(self) -> float:
        return float(self.r_values[0])

    @property
    def r_max(self) -> float:
        return float(self.r_values[-1])

    def __len__(self) -> int:
        return int(self.r_values.size)

    def same_as(self, other: "RadiusGrid") -> bool:
        return np.array_equal(self.r_values, other.r_values)


# =============================================================================
# K-function containers
# =============================================================================

@dataclass(frozen=True, eq=False)
class LocalKFunction:
    """Local K estimate of point `owner_index` sampled on a radius grid."""

    owner_index: int
    grid: RadiusGrid
    k_values: np.ndarray

    def __post_init__(self):
        k = np.array(self.k_values, dtype=float).reshape(-1)
        if k.size != len(self.grid):
            raise GridMismatchError(f"{k.size} K values for a grid of {len(self.grid)} radii")
        k.setflags(write=False)
        object.__setattr__(self, 'k_values', k)


@dataclass(frozen=True, eq=False)
class GlobalKFunction:
    """Pointwise mean of local K-functions."""

    grid: RadiusGrid
    k_values: np.ndarray

    def benchmark(self) -> np.ndarray:
        return k_pois(self.grid.r_values)


def k_pois(r):
    """Poisson benchmark K(r) = pi r^2 (scalar or array)."""
    return np.pi * np.square(r)


# =============================================================================
# Estimation
# =============================================================================

def translation_weight(w: ObservationWindow, xi, xj) -> float:
    """
    Translation edge-correction weight |W| / |W ∩ (W + (xj - xi))|.

    Raises:
        UndefinedWeightError: the displacement is at least a side length
    """
    dx = abs(float(xj[0]) - float(xi[0]))
    dy = abs(float(xj[1]) - float(xi[1]))
    overlap_x = w.width - dx
    overlap_y = w.height - dy
    if overlap_x <= 0 or overlap_y <= 0:
        raise UndefinedWeightError(f"Displacement ({dx}, {dy}) leaves no overlap in a {w.width}x{w.height} window")
    return w.area / (overlap_x * overlap_y)


def _pair_weights(w: ObservationWindow, dx: np.ndarray, dy: np.ndarray) -> np.ndarray:
    """Vectorised translation weights; undefined pairs get weight 0."""
    overlap = (w.width - np.abs(dx)) * (w.height - np.abs(dy))
    valid = (w.width - np.abs(dx) > 0) & (w.height - np.abs(dy) > 0)
    weights = np.zeros_like(overlap)
    weights[valid] = w.area / overlap[valid]
    return weights


def _require_pairs(p: PointPattern) -> None:
    if p.n < 2:
        raise InsufficientPointsError(2, p.n, what="local K-function")


def local_k(p: PointPattern, i: int, g: RadiusGrid) -> LocalKFunction:
    """
    Local K-function of point i.

    K_i(r) = (|W|/n) * sum_{j != i} w(x_i, x_j) 1{|x_j - x_i| <= r}

    Args:
        p: Pattern with at least two points
        i: Index of the owner point
        g: Radius grid

    Returns:
        LocalKFunction of point i
    """
    _require_pairs(p)
    if not 0 <= i < p.n:
        raise ParameterError('i', i, f"0 <= i < {p.n}")
    others = np.delete(p.points, i, axis=0)
    delta = others - p.points[i]
    dist = np.hypot(delta[:, 0], delta[:, 1])
    weights = _pair_weights(p.window, delta[:, 0], delta[:, 1])
    bins = np.searchsorted(g.r_values, dist, side='left')
    counted = bins < len(g)
    hist = np.bincount(bins[counted], weights=weights[counted], minlength=len(g))
    scale = p.window.area / p.n
    return LocalKFunction(i, g, scale * np.cumsum(hist))


def local_k_matrix(p: PointPattern, g: RadiusGrid) -> np.ndarray:
    """
    Local K values of every point as an (n, len(g)) array.

    Close pairs are found with a KD-tree limited to r_max.
    """
    _require_pairs(p)
    n, m = p.n, len(g)
    tree = cKDTree(p.points)
    pairs = tree.query_pairs(g.r_max, output_type='ndarray')
    hist = np.zeros((n, m + 1))
    if pairs.size:
        i_idx, j_idx = pairs[:, 0], pairs[:, 1]
        delta = p.points[j_idx] - p.points[i_idx]
        dist = np.hypot(delta[:, 0], delta[:, 1])
        weights = _pair_weights(p.window, delta[:, 0], delta[:, 1])
        bins = np.searchsorted(g.r_values, dist, side='left')
        np.add.at(hist, (i_idx, bins), weights)
        np.add.at(hist, (j_idx, bins), weights)
    logger.debug(f"local K: {n} points, {len(pairs)} pairs within r_max={g.r_max:.4g}")
    return (p.window.area / n) * np.cumsum(hist[:, :m], axis=1)


def local_k_all(p: PointPattern, g: RadiusGrid) -> List[LocalKFunction]:
    """Local K-functions of every point, in pattern order."""
    matrix = local_k_matrix(p, g)
    return [LocalKFunction(i, g, matrix[i]) for i in range(p.n)]


def global_k(locals_: Sequence[LocalKFunction]) -> GlobalKFunction:
    """
    Pointwise mean of local K-functions.

    Raises:
        NoDataError: empty input
        GridMismatchError: the locals do not share a radius grid
    """
    if len(locals_) == 0:
        raise NoDataError("global_k needs at least one local K-function")
    grid = locals_[0].grid
    for item in locals_[1:]:
        if not item.grid.same_as(grid):
            raise GridMismatchError(f"Local K-function {item.owner_index} uses a different radius grid")
    stacked = np.vstack([item.k_values for item in locals_])
    return GlobalKFunction(grid, stacked.mean(axis=0))
