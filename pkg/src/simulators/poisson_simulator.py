"""
Poisson process simulators: homogeneous, linear-trend and modulated.
Inhomogeneous samples are drawn by thinning a dominating homogeneous process.
"""
import logging
from typing import Callable, Optional, Tuple, Union

import numpy as np

from src.core import ObservationWindow, PointPattern, RasterSurface
from src.enums import ScenarioFamily
from src.errors import DataError, DominatingBoundError, ParameterError
from src.simulators.base_simulator import PointProcessSimulator, SeedLike, as_generator, uniform_points

logger = logging.getLogger(__name__)

Intensity = Union[RasterSurface, Callable[[np.ndarray, np.ndarray], np.ndarray]]

BOUND_TOLERANCE = 1e-12


def sim_poisson_homog(rho: float, w: ObservationWindow, seed: SeedLike = None) -> PointPattern:
    """
    Homogeneous Poisson process: N ~ Poisson(rho |W|) uniform points.

    Args:
        rho: Intensity (> 0)
        w: Observation window
        seed: Integer seed or Generator
    """
    if not (np.isfinite(rho) and rho > 0):
        raise ParameterError('rho', rho, "> 0")
    rng = as_generator(seed)
    count = rng.poisson(rho * w.area)
    return PointPattern(uniform_points(w, count, rng), w)


def _evaluate_intensity(intensity: Intensity, points: np.ndarray) -> np.ndarray:
    if isinstance(intensity, RasterSurface):
        return intensity.values_at(points)
    values = intensity(points[:, 0], points[:, 1])
    return np.broadcast_to(np.asarray(values, dtype=float), (points.shape[0],))


def sim_poisson_inhom(
    intensity: Intensity,
    lambda_max: float,
    w: ObservationWindow,
    seed: SeedLike = None,
) -> PointPattern:
    """
    Inhomogeneous Poisson process by independent thinning.

    A homogeneous Poisson(lambda_max) sample is retained pointwise with
    probability intensity(u) / lambda_max. The same operator thins any
    imported pattern.

    Raises:
        DominatingBoundError: intensity exceeds lambda_max at a proposal
    """
    if not (np.isfinite(lambda_max) and lambda_max > 0):
        raise ParameterError('lambda_max', lambda_max, "> 0")
    rng = as_generator(seed)
    proposals = sim_poisson_homog(lambda_max, w, rng)
    return thin(proposals, intensity, lambda_max, rng)


def thin(pattern: PointPattern, intensity: Intensity, lambda_max: float, seed: SeedLike = None) -> PointPattern:
    """Independent thinning with retention probability intensity(u) / lambda_max."""
    rng = as_generator(seed)
    if pattern.n == 0:
        return pattern
    values = _evaluate_intensity(intensity, pattern.points)
    if np.any(values < 0):
        raise DataError(f"Negative intensity {float(values.min())} at a proposal")
    if np.any(values > lambda_max * (1 + BOUND_TOLERANCE)):
        raise DominatingBoundError(
            f"Intensity {float(values.max()):.6g} exceeds the dominating bound {lambda_max:.6g}"
        )
    keep = rng.uniform(size=pattern.n) < values / lambda_max
    return PointPattern(pattern.points[keep], pattern.window)


# =============================================================================
# Scenario simulators
# =============================================================================

class PoissonHomogSimulator(PointProcessSimulator):
    """Constant intensity rho."""

    FAMILY = ScenarioFamily.POISSON_HOMOG
    REQUIRED_PARAMETERS = ('rho',)

    def validate_parameters(self) -> None:
        self._require_positive('rho', self.parameters['rho'])

    def simulate(self, seed: SeedLike) -> PointPattern:
        return sim_poisson_homog(self.parameters['rho'], self.window, seed)

    def true_intensity(self, nx: int, ny: int) -> RasterSurface:
        return RasterSurface.constant(self.window, nx, ny, self.parameters['rho'])

    def expected_count(self) -> float:
        return self.parameters['rho'] * self.window.area


class PoissonLinearSimulator(PointProcessSimulator):
    """Linear trend rho(x, y) = intercept + alpha * x."""

    FAMILY = ScenarioFamily.POISSON_LINEAR
    PARAMETER_DEFAULTS = {'intercept': 10.0}
    REQUIRED_PARAMETERS = ('alpha',)

    def validate_parameters(self) -> None:
        ends = self._intensity(np.array([self.window.x_min, self.window.x_max]), np.zeros(2))
        if np.any(ends < 0):
            raise ParameterError('alpha', self.parameters['alpha'], "intensity >= 0 on the window")
        if np.all(ends == 0):
            raise ParameterError('intercept', self.parameters['intercept'], "intensity not identically 0")

    def _intensity(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.parameters['intercept'] + self.parameters['alpha'] * np.asarray(x, dtype=float) + 0.0 * y

    def lambda_max(self) -> float:
        return float(self._intensity(np.array([self.window.x_min, self.window.x_max]), np.zeros(2)).max())

    def simulate(self, seed: SeedLike) -> PointPattern:
        return sim_poisson_inhom(self._intensity, self.lambda_max(), self.window, seed)

    def true_intensity(self, nx: int, ny: int) -> RasterSurface:
        return RasterSurface.from_function(self.window, nx, ny, self._intensity)

    def expected_count(self) -> float:
        w = self.window
        mean_x = 0.5 * (w.x_min + w.x_max)
        return (self.parameters['intercept'] + self.parameters['alpha'] * mean_x) * w.area

    def default_trend_covariates(self) -> Tuple[str, ...]:
        return ('x',)


class PoissonModulatedSimulator(PointProcessSimulator):
    """Modulated intensity rho(x, y) = alpha + beta * cos(frequency * x)."""

    FAMILY = ScenarioFamily.POISSON_MODULATED
    PARAMETER_DEFAULTS = {'beta': 100.0, 'frequency': 10.0}
    REQUIRED_PARAMETERS = ('alpha',)

    def validate_parameters(self) -> None:
        if self.parameters['alpha'] < abs(self.parameters['beta']):
            raise ParameterError('alpha', self.parameters['alpha'], f">= |beta| ({abs(self.parameters['beta'])})")
        self._require_positive('alpha', self.parameters['alpha'])

    def _intensity(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        p = self.parameters
        return p['alpha'] + p['beta'] * np.cos(p['frequency'] * np.asarray(x, dtype=float)) + 0.0 * y

    def lambda_max(self) -> float:
        return self.parameters['alpha'] + abs(self.parameters['beta'])

    def simulate(self, seed: SeedLike) -> PointPattern:
        return sim_poisson_inhom(self._intensity, self.lambda_max(), self.window, seed)

    def true_intensity(self, nx: int, ny: int) -> RasterSurface:
        return RasterSurface.from_function(self.window, nx, ny, self._intensity)

    def expected_count(self) -> Optional[float]:
        p, w = self.parameters, self.window
        f = p['frequency']
        if f == 0:
            return (p['alpha'] + p['beta']) * w.area
        cos_integral = (np.sin(f * w.x_max) - np.sin(f * w.x_min)) / f
        return float((p['alpha'] * w.width + p['beta'] * cos_integral) * w.height)

    def default_trend_covariates(self) -> Tuple[str, ...]:
        return ('x',)
