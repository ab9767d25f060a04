"""
Point patterns and marked point patterns.
"""
from dataclasses import dataclass

import numpy as np

from src.core.window import ObservationWindow
from src.errors import DataError, OutOfDomainError


def _frozen(values: np.ndarray) -> np.ndarray:
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class PointPattern:
    """
    Finite planar point set observed in a window.

    Attributes:
        points: Array of shape (n, 2), one (x, y) row per point
        window: Observation window containing every point
    """

    points: np.ndarray
    window: ObservationWindow

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1, 2)
        if not np.all(np.isfinite(pts)):
            raise DataError("Point coordinates must be finite")
        outside = ~self.window.contains(pts)
        if pts.shape[0] and outside.any():
            first = int(np.flatnonzero(outside)[0])
            raise OutOfDomainError(
                f"{int(outside.sum())} point(s) outside the window, first at index {first}: "
                f"({pts[first, 0]}, {pts[first, 1]})"
            )
        object.__setattr__(self, 'points', _frozen(pts))

    @classmethod
    def empty(cls, window: ObservationWindow) -> "PointPattern":
        return cls(np.empty((0, 2)), window)

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    def __len__(self) -> int:
        return self.n

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]

    @property
    def stationary_intensity(self) -> float:
        """Stationary intensity estimate n / |W|."""
        return self.n / self.window.area

    def same_as(self, other: "PointPattern") -> bool:
        """Bit-for-bit equality of points and window."""
        return self.window == other.window and np.array_equal(self.points, other.points)


@dataclass(frozen=True, eq=False)
class MarkedPattern:
    """Point pattern carrying one finite real mark per point."""

    pattern: PointPattern
    marks: np.ndarray

    def __post_init__(self):
        marks = np.array(self.marks, dtype=float).reshape(-1)
        if marks.shape[0] != self.pattern.n:
            raise DataError(f"Got {marks.shape[0]} marks for {self.pattern.n} points")
        if not np.all(np.isfinite(marks)):
            raise DataError("Marks must be finite")
        object.__setattr__(self, 'marks', _frozen(marks))

    @property
    def n(self) -> int:
        return self.pattern.n

    @property
    def points(self) -> np.ndarray:
        return self.pattern.points

    @property
    def window(self) -> ObservationWindow:
        return self.pattern.window
