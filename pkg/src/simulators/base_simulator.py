"""
Base simulator interface for point-process scenario families.
Provides parameter resolution and validation shared by all simulators.
"""
import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from src.core import ObservationWindow, PointPattern, RasterSurface
from src.enums import ScenarioFamily
from src.errors import ConfigurationError, ParameterError

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.Generator, None]


def as_generator(seed: SeedLike) -> np.random.Generator:
    """Generator from an int seed (or pass a Generator through)."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def uniform_points(window: ObservationWindow, count: int, rng: np.random.Generator) -> np.ndarray:
    """`count` independent uniform locations in a window, shape (count, 2)."""
    xs = rng.uniform(window.x_min, window.x_max, size=count)
    ys = rng.uniform(window.y_min, window.y_max, size=count)
    return np.column_stack([xs, ys])


class PointProcessSimulator(ABC):
    """
    Abstract base class for scenario simulators.

    Subclasses declare their family, parameter defaults and the parameters
    that must be supplied, and implement `simulate`.
    """

    FAMILY: ScenarioFamily = None
    PARAMETER_DEFAULTS: Dict[str, float] = {}
    REQUIRED_PARAMETERS: Tuple[str, ...] = ()

    def __init__(self, window: ObservationWindow, **parameters: Any):
        """
        Args:
            window: Observation window
            **parameters: Family parameters; unknown names are rejected
        """
        self.window = window
        self.parameters = self._resolve_parameters(parameters)
        self.validate_parameters()

    def _resolve_parameters(self, supplied: Dict[str, Any]) -> Dict[str, float]:
        allowed = set(self.PARAMETER_DEFAULTS) | set(self.REQUIRED_PARAMETERS)
        unknown = sorted(set(supplied) - allowed)
        if unknown:
            raise ConfigurationError(
                f"Unknown parameter(s) {unknown} for family '{self.FAMILY.value}'; "
                f"allowed: {sorted(allowed)}"
            )
        missing = [name for name in self.REQUIRED_PARAMETERS if supplied.get(name) is None]
        if missing:
            raise ConfigurationError(f"Missing parameter(s) {missing} for family '{self.FAMILY.value}'")
        resolved = dict(self.PARAMETER_DEFAULTS)
        resolved.update({k: v for k, v in supplied.items() if v is not None})
        return resolved

    @staticmethod
    def _require_positive(name: str, value: float) -> None:
        if value is None or not np.isfinite(value) or value <= 0:
            raise ParameterError(name, value, "> 0")

    def validate_parameters(self) -> None:
        """Override to enforce family constraints."""

    def get_family(self) -> ScenarioFamily:
        return self.FAMILY

    @abstractmethod
    def simulate(self, seed: SeedLike) -> PointPattern:
        """Draw one pattern."""

    def true_intensity(self, nx: int, ny: int) -> Optional[RasterSurface]:
        """Closed-form intensity on a raster, or None when it is not tractable."""
        return None

    def expected_count(self) -> Optional[float]:
        """Expected number of points in the window, when known."""
        return None

    def default_trend_covariates(self) -> Tuple[str, ...]:
        """Covariates used by the replication study for this family."""
        return ()
