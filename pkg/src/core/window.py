"""
Observation windows.

Only axis-aligned rectangles are supported.
"""
from dataclasses import dataclass
from typing import Dict

import numpy as np

from src.errors import ParameterError


@dataclass(frozen=True)
class ObservationWindow:
    """Axis-aligned rectangle [x_min, x_max] x [y_min, y_max]."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        for name in ('x_min', 'x_max', 'y_min', 'y_max'):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ParameterError(name, value, "finite coordinate")
            object.__setattr__(self, name, float(value))
        if not self.x_max > self.x_min:
            raise ParameterError('x_max', self.x_max, f"x_max > x_min ({self.x_min})")
        if not self.y_max > self.y_min:
            raise ParameterError('y_max', self.y_max, f"y_max > y_min ({self.y_min})")

    @classmethod
    def unit_square(cls) -> "ObservationWindow":
        return cls(0.0, 1.0, 0.0, 1.0)

    @classmethod
    def from_dict(cls, data: Dict[str, float]) -> "ObservationWindow":
        """Build a window from a `{"x_min", "x_max", "y_min", "y_max"}` mapping."""
        return cls(data['x_min'], data['x_max'], data['y_min'], data['y_max'])

    def to_dict(self) -> Dict[str, float]:
        return {'x_min': self.x_min, 'x_max': self.x_max, 'y_min': self.y_min, 'y_max': self.y_max}

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def diagonal(self) -> float:
        return float(np.hypot(self.width, self.height))

    def contains(self, points: np.ndarray) -> np.ndarray:
        """
        Closed-boundary membership test.

        Args:
            points: Array of shape (n, 2) (or a single (2,) point)

        Returns:
            Boolean array of length n
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return (
            (pts[:, 0] >= self.x_min) & (pts[:, 0] <= self.x_max)
            & (pts[:, 1] >= self.y_min) & (pts[:, 1] <= self.y_max)
        )

    def expanded(self, margin: float) -> "ObservationWindow":
        """Window grown by `margin` on every side."""
        return ObservationWindow(
            self.x_min - margin, self.x_max + margin, self.y_min - margin, self.y_max + margin
        )


def window_area(w: ObservationWindow) -> float:
    """Area (x_max - x_min) * (y_max - y_min) of a window."""
    return w.area
