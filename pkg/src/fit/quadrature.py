"""
Quadrature schemes for the Poisson log-likelihood.

Dummy nodes sit at the centres of a regular grid; data and dummy nodes share
each tile's area equally (counting weights), so the weights partition W.
"""
from dataclasses import dataclass

import numpy as np

from src.core import ObservationWindow, PointPattern, grid_centres
from src.errors import ParameterError

MIN_DUMMY_PER_SIDE = 8
DEFAULT_DUMMY_PER_SIDE = 64
LARGE_PATTERN_DUMMY_PER_SIDE = 100
LARGE_PATTERN_THRESHOLD = 500


@dataclass(frozen=True, eq=False)
class QuadratureScheme:
    """
    Attributes:
        nodes: (m, 2) array, data points first then dummy points
        weights: positive weight per node
        is_data: True for data nodes
        window: Window the weights partition
        dummy_per_side: Side count of the dummy grid
    """

    nodes: np.ndarray
    weights: np.ndarray
    is_data: np.ndarray
    window: ObservationWindow
    dummy_per_side: int

    @property
    def n_data(self) -> int:
        return int(np.count_nonzero(self.is_data))

    @property
    def n_nodes(self) -> int:
        return int(self.nodes.shape[0])


def default_dummy_per_side(n_points: int) -> int:
    """64 dummies per side, 100 for patterns above 500 points."""
    return LARGE_PATTERN_DUMMY_PER_SIDE if n_points > LARGE_PATTERN_THRESHOLD else DEFAULT_DUMMY_PER_SIDE


def make_quadrature(p: PointPattern, dummy_per_side: int = None) -> QuadratureScheme:
    """
    Data points plus a dummy_per_side^2 grid of dummies with counting weights.

    Args:
        p: Point pattern (may be empty)
        dummy_per_side: Dummy grid side count (>= 8); default depends on n

    Returns:
        QuadratureScheme whose weights sum to |W|
    """
    k = default_dummy_per_side(p.n) if dummy_per_side is None else int(dummy_per_side)
    if k < MIN_DUMMY_PER_SIDE:
        raise ParameterError('dummy_per_side', k, f">= {MIN_DUMMY_PER_SIDE}")
    w = p.window
    xx, yy = grid_centres(w, k, k)
    dummies = np.column_stack([xx.ravel(), yy.ravel()])
    nodes = np.vstack([p.points, dummies])

    cols = np.clip(np.floor((nodes[:, 0] - w.x_min) / (w.width / k)).astype(int), 0, k - 1)
    rows = np.clip(np.floor((nodes[:, 1] - w.y_min) / (w.height / k)).astype(int), 0, k - 1)
    tile = rows * k + cols
    counts = np.bincount(tile, minlength=k * k)
    weights = (w.area / (k * k)) / counts[tile]

    is_data = np.zeros(nodes.shape[0], dtype=bool)
    is_data[:p.n] = True
    for arr in (nodes, weights, is_data):
        arr.setflags(write=False)
    return QuadratureScheme(nodes, weights, is_data, w, k)
