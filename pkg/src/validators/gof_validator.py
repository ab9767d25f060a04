"""
Goodness-of-fit measures for fitted intensity surfaces.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.core import ObservationWindow, PointPattern, RasterSurface
from src.enums import MetricKind
from src.errors import ConfigurationError, DegenerateTileError, GridMismatchError, NoDataError, ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadratPartition:
    """rows x cols grid of disjoint rectangular tiles covering the window."""

    window: ObservationWindow
    rows: int = 5
    cols: int = 5

    def __post_init__(self):
        if int(self.rows) < 1:
            raise ParameterError('rows', self.rows, ">= 1")
        if int(self.cols) < 1:
            raise ParameterError('cols', self.cols, ">= 1")
        object.__setattr__(self, 'rows', int(self.rows))
        object.__setattr__(self, 'cols', int(self.cols))

    def tile_of(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Row and column of the tile containing each point (lower edges inclusive)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        w = self.window
        cols = np.floor((pts[:, 0] - w.x_min) / (w.width / self.cols)).astype(int)
        rows = np.floor((pts[:, 1] - w.y_min) / (w.height / self.rows)).astype(int)
        return np.clip(rows, 0, self.rows - 1), np.clip(cols, 0, self.cols - 1)

    def tiles(self) -> List[ObservationWindow]:
        """Tiles in row-major order from the (x_min, y_min) corner."""
        w = self.window
        xs = np.linspace(w.x_min, w.x_max, self.cols + 1)
        ys = np.linspace(w.y_min, w.y_max, self.rows + 1)
        return [
            ObservationWindow(xs[c], xs[c + 1], ys[r], ys[r + 1])
            for r in range(self.rows) for c in range(self.cols)
        ]

    def counts(self, p: PointPattern) -> np.ndarray:
        """Point counts per tile, shape (rows, cols)."""
        grid = np.zeros((self.rows, self.cols), dtype=int)
        if p.n:
            rows, cols = self.tile_of(p.points)
            np.add.at(grid, (rows, cols), 1)
        return grid

    def expected(self, fitted: RasterSurface) -> np.ndarray:
        """Midpoint-rule integral of `fitted` per tile, each cell assigned by its centre."""
        xx, yy = fitted.centres()
        rows, cols = self.tile_of(np.column_stack([xx.ravel(), yy.ravel()]))
        grid = np.zeros((self.rows, self.cols))
        np.add.at(grid, (rows, cols), fitted.values.ravel() * fitted.cell_area)
        return grid


# =============================================================================
# Metrics
# =============================================================================

def integrated_squared_error(estimate: RasterSurface, truth: RasterSurface) -> float:
    truth.require_same_grid(estimate)
    return float(truth.cell_area * np.sum(np.square(estimate.values - truth.values)))


def mise(estimates: Sequence[RasterSurface], truth: RasterSurface) -> float:
    """
    Monte Carlo mean integrated squared error against a known intensity.

    Raises:
        NoDataError: no estimates
        GridMismatchError: an estimate is on a different grid
    """
    if len(estimates) == 0:
        raise NoDataError("MISE needs at least one estimate")
    return float(np.mean([integrated_squared_error(e, truth) for e in estimates]))


def pearson_chi2(p: PointPattern, fitted: RasterSurface, q: QuadratPartition) -> float:
    """
    Pearson quadrat statistic sum_i (n_i - E_i)^2 / E_i with E_i the fitted tile mass.

    Raises:
        DegenerateTileError: a tile has zero fitted mass
    """
    if q.window != fitted.window:
        raise GridMismatchError("Quadrat partition and fitted surface use different windows")
    expected = q.expected(fitted)
    zero = np.argwhere(expected <= 0)
    if zero.size:
        raise DegenerateTileError(int(zero[0][0]), int(zero[0][1]))
    observed = q.counts(p)
    return float(np.sum(np.square(observed - expected) / expected))


class GoodnessOfFitValidator:
    """Scores fitted intensity surfaces with one metric."""

    def __init__(self, metric: MetricKind, quadrats: Tuple[int, int] = (5, 5)):
        """
        Args:
            metric: mise or chi2
            quadrats: (rows, cols) of the chi2 partition
        """
        self.metric = MetricKind(metric)
        self.quadrats = quadrats

    def score(self, p: PointPattern, fitted: RasterSurface, truth: Optional[RasterSurface] = None) -> float:
        """Metric value of one fitted surface."""
        if self.metric == MetricKind.MISE:
            if truth is None:
                raise ConfigurationError("MISE needs a known true intensity")
            return integrated_squared_error(fitted, truth)
        partition = QuadratPartition(fitted.window, *self.quadrats)
        return pearson_chi2(p, fitted, partition)
