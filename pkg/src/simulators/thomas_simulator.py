"""
Thomas cluster process simulator.

Parents are a homogeneous Poisson process on the window grown by four
displacement standard deviations; each parent gets Poisson(mu(parent))
offspring displaced by isotropic Gaussians. Offspring outside W are dropped.
"""
import logging
from typing import Callable, Tuple, Union

import numpy as np

from src.core import ObservationWindow, PointPattern
from src.enums import ScenarioFamily
from src.errors import ParameterError
from src.simulators.base_simulator import PointProcessSimulator, SeedLike, as_generator, uniform_points

logger = logging.getLogger(__name__)

EDGE_MARGIN_SIGMAS = 4.0

OffspringMean = Union[float, Callable[[np.ndarray, np.ndarray], np.ndarray]]


def sim_thomas(
    kappa: float,
    disp_sigma: float,
    mu_fn: OffspringMean,
    w: ObservationWindow,
    seed: SeedLike = None,
) -> PointPattern:
    """
    Thomas process with parent intensity kappa and offspring mean mu_fn(parent).

    Args:
        kappa: Parent intensity (> 0)
        disp_sigma: Standard deviation of offspring displacement per axis (> 0)
        mu_fn: Constant or vectorised function of parent coordinates (>= 0)
        w: Observation window
        seed: Integer seed or Generator
    """
    if not (np.isfinite(kappa) and kappa > 0):
        raise ParameterError('kappa', kappa, "> 0")
    if not (np.isfinite(disp_sigma) and disp_sigma > 0):
        raise ParameterError('disp_sigma', disp_sigma, "> 0")
    rng = as_generator(seed)
    extended = w.expanded(EDGE_MARGIN_SIGMAS * disp_sigma)
    parents = uniform_points(extended, rng.poisson(kappa * extended.area), rng)

    if callable(mu_fn):
        means = np.broadcast_to(np.asarray(mu_fn(parents[:, 0], parents[:, 1]), dtype=float), (parents.shape[0],))
    else:
        means = np.full(parents.shape[0], float(mu_fn))
    if np.any(means < 0):
        raise ParameterError('mu', float(means.min()), ">= 0")

    offspring_counts = rng.poisson(means)
    centres = np.repeat(parents, offspring_counts, axis=0)
    offspring = centres + rng.normal(scale=disp_sigma, size=centres.shape)
    inside = w.contains(offspring) if offspring.shape[0] else np.zeros(0, dtype=bool)
    logger.debug(f"Thomas: {parents.shape[0]} parents, {offspring.shape[0]} offspring, {int(inside.sum())} inside W")
    return PointPattern(offspring[inside], w)


class ThomasSimulator(PointProcessSimulator):
    """
    Thomas process with offspring mean mu * exp(mu_gradient * (x - 1/2)).

    mu_gradient = 0 gives the stationary process; the defaults give the
    scenario mean 5 exp(2x - 1).
    """

    FAMILY = ScenarioFamily.THOMAS
    PARAMETER_DEFAULTS = {'sigma': 0.2, 'mu': 5.0, 'mu_gradient': 2.0}
    REQUIRED_PARAMETERS = ('kappa',)

    def validate_parameters(self) -> None:
        for name in ('kappa', 'sigma'):
            self._require_positive(name, self.parameters[name])
        if self.parameters['mu'] < 0:
            raise ParameterError('mu', self.parameters['mu'], ">= 0")

    def offspring_mean(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        g = self.parameters['mu_gradient']
        return self.parameters['mu'] * np.exp(g * np.asarray(x, dtype=float) - g / 2.0) + 0.0 * y

    def simulate(self, seed: SeedLike) -> PointPattern:
        return sim_thomas(
            self.parameters['kappa'], self.parameters['sigma'], self.offspring_mean, self.window, seed
        )

    def default_trend_covariates(self) -> Tuple[str, ...]:
        return ('x',)
