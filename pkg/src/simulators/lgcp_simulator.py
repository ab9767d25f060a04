"""
Log-Gaussian Cox process simulator.

The Gaussian field has exponential covariance sigma2 * exp(-beta * d) and is
sampled on the raster by circulant embedding on a torus twice the grid size
per axis (four times after one failed attempt).
"""
import logging
from typing import Optional, Tuple

import numpy as np
from numpy import fft
from tenacity import Retrying, before_sleep_log, retry_if_exception_type, stop_after_attempt

from src.core import ObservationWindow, PointPattern, RasterSurface, surface_integral
from src.enums import ScenarioFamily
from src.errors import EmbeddingError, ParameterError
from src.simulators.base_simulator import PointProcessSimulator, SeedLike, as_generator

logger = logging.getLogger(__name__)

NEGATIVE_EIGEN_TOL = 1e-8
EMBEDDING_ATTEMPTS = 2


def _is_power_of_two(value: int) -> bool:
    return value >= 1 and (value & (value - 1)) == 0


def _embedding_eigenvalues(
    nx: int, ny: int, dx: float, dy: float, sigma2: float, beta: float, factor: int, approximate: bool
) -> np.ndarray:
    """Eigenvalues of the circulant covariance on a (factor*ny, factor*nx) torus."""
    my, mx = factor * ny, factor * nx
    lag_x = np.minimum(np.arange(mx), mx - np.arange(mx)) * dx
    lag_y = np.minimum(np.arange(my), my - np.arange(my)) * dy
    distance = np.hypot(*np.meshgrid(lag_x, lag_y))
    eigenvalues = np.real(fft.fft2(sigma2 * np.exp(-beta * distance)))
    threshold = -NEGATIVE_EIGEN_TOL * eigenvalues.max()
    negative = eigenvalues < threshold
    if negative.any():
        if not approximate:
            raise EmbeddingError(
                f"Circulant embedding on a {mx}x{my} torus has {int(negative.sum())} negative "
                f"eigenvalue(s), min {float(eigenvalues.min()):.4g}"
            )
        logger.warning(
            f"Clipping {int(negative.sum())} negative embedding eigenvalue(s) "
            f"(min {float(eigenvalues.min()):.4g}) on a {mx}x{my} torus"
        )
    return np.clip(eigenvalues, 0.0, None)


def circulant_eigenvalues(
    window: ObservationWindow, nx: int, ny: int, sigma2: float, beta: float, approximate: bool = False
) -> np.ndarray:
    """
    Embedding eigenvalues for the field on an nx x ny raster of `window`.

    Raises:
        EmbeddingError: not non-negative definite on the doubled torus either
    """
    dx, dy = window.width / nx, window.height / ny
    for attempt in Retrying(
        stop=stop_after_attempt(EMBEDDING_ATTEMPTS),
        retry=retry_if_exception_type(EmbeddingError),
        before_sleep=before_sleep_log(logger, logging.WARNING),
        reraise=True,
    ):
        with attempt:
            factor = 2 ** attempt.retry_state.attempt_number
            return _embedding_eigenvalues(nx, ny, dx, dy, sigma2, beta, factor, approximate)


def gaussian_field(
    window: ObservationWindow,
    nx: int,
    ny: int,
    sigma2: float,
    beta: float,
    seed: SeedLike = None,
    approximate: bool = False,
    eigenvalues: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Zero-mean stationary Gaussian field with covariance sigma2 exp(-beta d) at cell centres.

    Returns:
        Array of shape (ny, nx)
    """
    rng = as_generator(seed)
    if eigenvalues is None:
        eigenvalues = circulant_eigenvalues(window, nx, ny, sigma2, beta, approximate)
    my, mx = eigenvalues.shape
    noise = rng.standard_normal((my, mx)) + 1j * rng.standard_normal((my, mx))
    field = fft.fft2(np.sqrt(eigenvalues / (mx * my)) * noise)
    return np.real(field)[:ny, :nx]


def sim_lgcp(
    mu: RasterSurface,
    sigma2: float,
    beta: float,
    seed: SeedLike = None,
    approximate: bool = False,
    eigenvalues: Optional[np.ndarray] = None,
) -> PointPattern:
    """
    LGCP with driving intensity exp(mu(u) + Z(u)) on the raster of `mu`.

    Given the field, cell counts are Poisson(Lambda * cell area) with points
    placed uniformly inside their cell.

    Args:
        mu: Log-scale mean surface; its grid sides must be powers of two
        sigma2: Field variance (> 0)
        beta: Exponential covariance rate (> 0)
        seed: Integer seed or Generator
        approximate: Clip negative embedding eigenvalues instead of failing
        eigenvalues: Precomputed embedding eigenvalues for repeated draws
    """
    if not (np.isfinite(sigma2) and sigma2 > 0):
        raise ParameterError('sigma2', sigma2, "> 0")
    if not (np.isfinite(beta) and beta > 0):
        raise ParameterError('beta', beta, "> 0")
    if not (_is_power_of_two(mu.nx) and _is_power_of_two(mu.ny)):
        raise ParameterError('grid', (mu.nx, mu.ny), "powers of two")
    rng = as_generator(seed)
    field = gaussian_field(mu.window, mu.nx, mu.ny, sigma2, beta, rng, approximate, eigenvalues)
    driving = np.exp(mu.values + field)
    counts = rng.poisson(driving * mu.cell_area)

    rows, cols = np.nonzero(counts)
    reps = counts[rows, cols]
    rows, cols = np.repeat(rows, reps), np.repeat(cols, reps)
    w = mu.window
    xs = w.x_min + (cols + rng.uniform(size=cols.size)) * mu.cell_width
    ys = w.y_min + (rows + rng.uniform(size=rows.size)) * mu.cell_height
    points = np.column_stack([np.clip(xs, w.x_min, w.x_max), np.clip(ys, w.y_min, w.y_max)])
    return PointPattern(points, w)


class LGCPSimulator(PointProcessSimulator):
    """
    LGCP with a log-scale mean calibrated to a target expected count.

    mu(u) = m0 + trend * (quad_x (x - cx)^2 + quad_y (y - cy)^2), with m0 chosen so
    that the integral of exp(mu + sigma2/2) over W equals target_count.
    """

    FAMILY = ScenarioFamily.LGCP
    PARAMETER_DEFAULTS = {
        'sigma2': 0.15,
        'beta': 0.5,
        'trend': 0.0,
        'quad_x': -1.5,
        'quad_y': 2.0,
        'grid': 256,
        'approximate_embedding': 0.0,
    }
    REQUIRED_PARAMETERS = ('target_count',)

    def __init__(self, window: ObservationWindow, **parameters):
        self._eigenvalues = None
        super().__init__(window, **parameters)

    def validate_parameters(self) -> None:
        for name in ('sigma2', 'beta', 'target_count'):
            self._require_positive(name, self.parameters[name])
        grid = self.parameters['grid']
        if grid != int(grid) or not _is_power_of_two(int(grid)):
            raise ParameterError('grid', grid, "power of two")

    @property
    def grid(self) -> int:
        return int(self.parameters['grid'])

    @property
    def has_trend(self) -> bool:
        return bool(self.parameters['trend'])

    def _trend(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if not self.has_trend:
            return np.zeros_like(np.asarray(x, dtype=float))
        w = self.window
        cx, cy = 0.5 * (w.x_min + w.x_max), 0.5 * (w.y_min + w.y_max)
        return self.parameters['quad_x'] * np.square(x - cx) + self.parameters['quad_y'] * np.square(y - cy)

    def mean_level(self) -> float:
        """Calibrated m0."""
        trend_mass = surface_integral(RasterSurface.from_function(
            self.window, self.grid, self.grid, lambda x, y: np.exp(self._trend(x, y))
        ))
        return float(np.log(self.parameters['target_count']) - self.parameters['sigma2'] / 2 - np.log(trend_mass))

    def mean_surface(self, nx: int = None, ny: int = None) -> RasterSurface:
        nx, ny = nx or self.grid, ny or self.grid
        m0 = self.mean_level()
        return RasterSurface.from_function(self.window, nx, ny, lambda x, y: m0 + self._trend(x, y))

    def simulate(self, seed: SeedLike) -> PointPattern:
        approximate = bool(self.parameters['approximate_embedding'])
        if self._eigenvalues is None:
            self._eigenvalues = circulant_eigenvalues(
                self.window, self.grid, self.grid, self.parameters['sigma2'], self.parameters['beta'], approximate
            )
        return sim_lgcp(
            self.mean_surface(),
            self.parameters['sigma2'],
            self.parameters['beta'],
            seed,
            approximate=approximate,
            eigenvalues=self._eigenvalues,
        )

    def true_intensity(self, nx: int, ny: int) -> RasterSurface:
        mean = self.mean_surface(nx, ny)
        return mean.with_values(np.exp(mean.values + self.parameters['sigma2'] / 2))

    def expected_count(self) -> float:
        return float(self.parameters['target_count'])

    def default_trend_covariates(self) -> Tuple[str, ...]:
        return ('x2', 'y2') if self.has_trend else ()
