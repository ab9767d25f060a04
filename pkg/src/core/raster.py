"""
Gridded real-valued surfaces over an observation window.

`values` has shape (ny, nx); row 0 is the y_min row and column 0 the x_min
column. Values are read with cell-centre semantics: a location on an edge
shared by two cells belongs to the lower-index cell, and locations on
x_min or y_min belong to the first cell.
"""
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from src.core.window import ObservationWindow
from src.errors import DataError, GridMismatchError, OutOfDomainError, ParameterError


@dataclass(frozen=True, eq=False)
class RasterSurface:
    """Piecewise-constant field on an nx x ny grid of cells."""

    window: ObservationWindow
    nx: int
    ny: int
    values: np.ndarray

    def __post_init__(self):
        if int(self.nx) < 1:
            raise ParameterError('nx', self.nx, "positive cell count")
        if int(self.ny) < 1:
            raise ParameterError('ny', self.ny, "positive cell count")
        object.__setattr__(self, 'nx', int(self.nx))
        object.__setattr__(self, 'ny', int(self.ny))
        values = np.array(self.values, dtype=float)
        if values.shape != (self.ny, self.nx):
            raise GridMismatchError(f"values shape {values.shape} does not match (ny, nx)=({self.ny}, {self.nx})")
        if not np.all(np.isfinite(values)):
            raise DataError("Raster values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    # =========================================================================
    # Constructors
    # =========================================================================

    @classmethod
    def constant(cls, window: ObservationWindow, nx: int, ny: int, value: float) -> "RasterSurface":
        return cls(window, nx, ny, np.full((int(ny), int(nx)), float(value)))

    @classmethod
    def from_function(
        cls,
        window: ObservationWindow,
        nx: int,
        ny: int,
        fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
    ) -> "RasterSurface":
        """
        Sample a vectorised function fn(x, y) at the cell centres.

        Args:
            window: Observation window
            nx, ny: Cell counts
            fn: Function of two equally shaped arrays returning values of the same shape
        """
        xx, yy = grid_centres(window, nx, ny)
        values = np.broadcast_to(np.asarray(fn(xx, yy), dtype=float), xx.shape)
        return cls(window, nx, ny, values)

    def with_values(self, values: np.ndarray) -> "RasterSurface":
        """Surface on the same grid with new values."""
        return RasterSurface(self.window, self.nx, self.ny, values)

    # =========================================================================
    # Geometry
    # =========================================================================

    @property
    def shape(self) -> Tuple[int, int]:
        return self.ny, self.nx

    @property
    def cell_width(self) -> float:
        return self.window.width / self.nx

    @property
    def cell_height(self) -> float:
        return self.window.height / self.ny

    @property
    def cell_area(self) -> float:
        return self.window.area / (self.nx * self.ny)

    @property
    def x_centres(self) -> np.ndarray:
        return self.window.x_min + (np.arange(self.nx) + 0.5) * self.cell_width

    @property
    def y_centres(self) -> np.ndarray:
        return self.window.y_min + (np.arange(self.ny) + 0.5) * self.cell_height

    def centres(self) -> Tuple[np.ndarray, np.ndarray]:
        """Cell-centre coordinate arrays, each of shape (ny, nx)."""
        return grid_centres(self.window, self.nx, self.ny)

    def same_grid(self, other: "RasterSurface") -> bool:
        return self.window == other.window and self.nx == other.nx and self.ny == other.ny

    def require_same_grid(self, other: "RasterSurface") -> None:
        if not self.same_grid(other):
            raise GridMismatchError(
                f"Grid {self.nx}x{self.ny} on {self.window.to_dict()} does not match "
                f"{other.nx}x{other.ny} on {other.window.to_dict()}"
            )

    def cell_indices(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Row and column index of the cell containing each point.

        Raises:
            OutOfDomainError: a point lies outside the window
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[0] == 0:
            empty = np.empty(0, dtype=int)
            return empty, empty
        inside = self.window.contains(pts)
        if not inside.all():
            bad = pts[~inside][0]
            raise OutOfDomainError(f"Location ({bad[0]}, {bad[1]}) is outside the surface window")
        # ceil - 1 puts shared edges in the lower-index cell
        cols = np.ceil((pts[:, 0] - self.window.x_min) / self.cell_width).astype(int) - 1
        rows = np.ceil((pts[:, 1] - self.window.y_min) / self.cell_height).astype(int) - 1
        return np.clip(rows, 0, self.ny - 1), np.clip(cols, 0, self.nx - 1)

    def values_at(self, points: np.ndarray) -> np.ndarray:
        """Vectorised surface_at."""
        rows, cols = self.cell_indices(points)
        return self.values[rows, cols]

    def integral(self) -> float:
        return surface_integral(self)


def grid_centres(window: ObservationWindow, nx: int, ny: int) -> Tuple[np.ndarray, np.ndarray]:
    """Cell-centre meshgrid of shape (ny, nx) for a window."""
    xs = window.x_min + (np.arange(nx) + 0.5) * (window.width / nx)
    ys = window.y_min + (np.arange(ny) + 0.5) * (window.height / ny)
    return np.meshgrid(xs, ys)


def surface_at(s: RasterSurface, u) -> float:
    """Value of the cell containing location u."""
    return float(s.values_at(np.asarray(u, dtype=float).reshape(1, 2))[0])


def surface_integral(s: RasterSurface) -> float:
    """Midpoint-rule integral: cell area times the sum of values."""
    return float(s.cell_area * s.values.sum())
