"""
Discrepancy functionals between local K-functions and the Poisson benchmark.

Exponential kinds turn the discrepancy into an interaction weight phi* > 0;
metric kinds return a distance and are kept for comparison displays.
"""
import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from src.core import MarkedPattern, PointPattern
from src.enums import DiscrepancyKind
from src.errors import ParameterError, SingularIntegrandError
from src.localstats import LocalKFunction, RadiusGrid, k_pois, local_k_matrix
from src.utils.calculations import trapezoid

logger = logging.getLogger(__name__)

# exp(709) is the last finite double
MAX_EXPONENT = 700.0


@dataclass(frozen=True)
class DiscrepancySpec:
    """
    Attributes:
        kind: Discrepancy functional
        exponent: Power a of the normalised exponential discrepancy
        signed: Keep the sign of K - pi r^2 inside the normalised integrand
    """

    kind: DiscrepancyKind = DiscrepancyKind.EXP_NORMALIZED
    exponent: float = 2.0
    signed: bool = False

    def __post_init__(self):
        if isinstance(self.kind, str) and not isinstance(self.kind, DiscrepancyKind):
            object.__setattr__(self, 'kind', DiscrepancyKind.from_string(self.kind))
        if not (np.isfinite(self.exponent) and self.exponent > 0):
            raise ParameterError('exponent', self.exponent, "a > 0")


def _clip_exponent(exponent: np.ndarray) -> np.ndarray:
    too_large = exponent > MAX_EXPONENT
    if np.any(too_large):
        logger.warning(
            f"Discrepancy exponent above {MAX_EXPONENT} for {int(np.sum(too_large))} point(s), "
            f"max {float(np.max(exponent)):.4g}; clipping"
        )
        exponent = np.minimum(exponent, MAX_EXPONENT)
    return exponent


def discrepancy_values(k_values: np.ndarray, grid: RadiusGrid, spec: DiscrepancySpec) -> np.ndarray:
    """
    Discrepancy of one or many local K-functions.

    Args:
        k_values: Array of shape (m,) or (n, m) sampled on `grid`
        grid: Radius grid with m radii
        spec: Discrepancy settings

    Returns:
        Array of shape () or (n,)

    Raises:
        SingularIntegrandError: normalised integrand with r0 <= 0
    """
    r = grid.r_values
    benchmark = k_pois(r)
    diff = np.asarray(k_values, dtype=float) - benchmark

    if spec.kind == DiscrepancyKind.UNIFORM_METRIC:
        return np.max(np.abs(diff), axis=-1)
    if spec.kind == DiscrepancyKind.L2_METRIC:
        return np.sqrt(trapezoid(np.square(diff), r))
    if spec.kind == DiscrepancyKind.EXP_SQUARED:
        return np.exp(_clip_exponent(np.atleast_1d(trapezoid(np.square(diff), r)))).reshape(diff.shape[:-1])

    if grid.r0 <= 0:
        raise SingularIntegrandError(
            f"Normalised discrepancy divides by pi r^2; radius grid starts at r0={grid.r0}"
        )
    magnitude = np.power(np.abs(diff), spec.exponent)
    if spec.signed:
        magnitude = np.sign(diff) * magnitude
    exponent = trapezoid(magnitude / benchmark, r)
    return np.exp(_clip_exponent(np.atleast_1d(exponent))).reshape(diff.shape[:-1])


def discrepancy(local: LocalKFunction, spec: DiscrepancySpec) -> float:
    """Scalar discrepancy t(K_i, K_Pois) of one local K-function."""
    return float(discrepancy_values(local.k_values, local.grid, spec))


def phi_star_at_points(
    p: PointPattern,
    g: RadiusGrid,
    spec: Union[DiscrepancySpec, None] = None,
) -> MarkedPattern:
    """
    Point-level interaction weights phi*(x_i) = t(K_i, K_Pois).

    Args:
        p: Pattern with at least two points
        g: Radius grid
        spec: Discrepancy settings (default: normalised exponential, a=2)

    Returns:
        Pattern marked with phi* values
    """
    spec = spec or DiscrepancySpec()
    marks = discrepancy_values(local_k_matrix(p, g), g, spec)
    logger.debug(
        f"phi*: n={p.n}, kind={spec.kind.value}, median={float(np.median(marks)):.4g}, "
        f"range=[{float(np.min(marks)):.4g}, {float(np.max(marks)):.4g}]"
    )
    return MarkedPattern(p, marks)
