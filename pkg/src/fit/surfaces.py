"""
Fitted-intensity surfaces and residual diagnostics.

Gaussian kernels are separable, so kernel sums and convolutions over the
raster are products of one-dimensional density matrices.
"""
import logging
from typing import Mapping, Optional, Union

import numpy as np
from scipy import optimize, stats
from scipy.spatial.distance import pdist, squareform

from src.core import PointPattern, RasterSurface, grid_centres
from src.enums import EdgeCorrection, OffsetMode
from src.errors import InsufficientPointsError, NoDataError, ParameterError
from src.fit.model import Covariate, design_matrix
from src.fit.poisson_fit import FitResult

logger = logging.getLogger(__name__)

DEFAULT_RASTER = 128
CV_RASTER = 32


def predict_intensity(
    f: FitResult,
    covariates: Optional[Mapping[str, Covariate]] = None,
    nx: int = DEFAULT_RASTER,
    ny: int = DEFAULT_RASTER,
) -> RasterSurface:
    """
    Fitted intensity exp(theta . (1, z(u))) * B(u) at the cell centres.

    B is the offset surface in surface mode and 1 otherwise.

    Args:
        f: Fit result
        covariates: Covariates overriding those stored in the fit
        nx, ny: Raster resolution
    """
    if not f.converged:
        logger.warning("Predicting from a fit that did not converge")
    resolved = dict(f.covariates)
    resolved.update(covariates or {})
    xx, yy = grid_centres(f.window, nx, ny)
    centres = np.column_stack([xx.ravel(), yy.ravel()])
    eta = design_matrix(f.model.covariate_names, resolved, centres) @ f.theta
    if f.model.offset_mode == OffsetMode.SURFACE:
        eta = eta + f.model.log_offset_surface(centres)
    return RasterSurface(f.window, nx, ny, np.exp(eta).reshape(ny, nx))


def _axis_densities(centres: np.ndarray, locations: np.ndarray, bandwidth: float) -> np.ndarray:
    """Gaussian densities phi_h(centre - location), shape (len(centres), len(locations))."""
    return stats.norm.pdf(centres[:, None] - locations[None, :], scale=bandwidth)


def _check_bandwidth(bandwidth: float) -> float:
    if not (np.isfinite(bandwidth) and bandwidth > 0):
        raise ParameterError('bandwidth', bandwidth, "h > 0")
    return float(bandwidth)


def smoothed_raw_residuals(p: PointPattern, fitted: RasterSurface, bandwidth: float) -> RasterSurface:
    """
    s(u) = sum_i k_h(u - x_i) - integral_W k_h(u - v) fitted(v) dv

    The integral uses the raster midpoint rule.
    """
    h = _check_bandwidth(bandwidth)
    xs, ys = fitted.x_centres, fitted.y_centres
    counts = _axis_densities(ys, p.y, h) @ _axis_densities(xs, p.x, h).T
    gx = _axis_densities(xs, xs, h) * fitted.cell_width
    gy = _axis_densities(ys, ys, h) * fitted.cell_height
    smoothed_fit = gy @ fitted.values @ gx.T
    return fitted.with_values(counts - smoothed_fit)


def _edge_mass(window, x: np.ndarray, y: np.ndarray, h: float) -> np.ndarray:
    """c_W(u) = integral_W k_h(u - v) dv for an isotropic Gaussian kernel."""
    mass_x = stats.norm.cdf((window.x_max - x) / h) - stats.norm.cdf((window.x_min - x) / h)
    mass_y = stats.norm.cdf((window.y_max - y) / h) - stats.norm.cdf((window.y_min - y) / h)
    return mass_x * mass_y


def _kernel_surface(p: PointPattern, h: float, nx: int, ny: int, edge_correction: EdgeCorrection) -> np.ndarray:
    w = p.window
    xs = w.x_min + (np.arange(nx) + 0.5) * (w.width / nx)
    ys = w.y_min + (np.arange(ny) + 0.5) * (w.height / ny)
    ax = _axis_densities(xs, p.x, h)
    ay = _axis_densities(ys, p.y, h)
    if edge_correction == EdgeCorrection.DIGGLE:
        return (ay / _edge_mass(w, p.x, p.y, h)[None, :]) @ ax.T
    xx, yy = np.meshgrid(xs, ys)
    return (ay @ ax.T) / _edge_mass(w, xx, yy, h)


def likelihood_cv_score(p: PointPattern, bandwidth: float, edge_correction: EdgeCorrection = EdgeCorrection.UNIFORM,
                        distances: Optional[np.ndarray] = None) -> float:
    """
    Leave-one-out Poisson likelihood cross-validation score (to be maximised).

    sum_i log rho_{-i}(x_i) - integral_W rho(u) du
    """
    h = _check_bandwidth(bandwidth)
    if distances is None:
        distances = squareform(pdist(p.points))
    kernel = np.exp(-0.5 * np.square(distances / h)) / (2.0 * np.pi * h * h)
    np.fill_diagonal(kernel, 0.0)
    edge = _edge_mass(p.window, p.x, p.y, h)
    if edge_correction == EdgeCorrection.DIGGLE:
        loo = kernel @ (1.0 / edge)
        total = float(p.n)
    else:
        loo = kernel.sum(axis=1) / edge
        total = float(_kernel_surface(p, h, CV_RASTER, CV_RASTER, edge_correction).sum()
                      * p.window.area / CV_RASTER ** 2)
    with np.errstate(divide='ignore'):
        return float(np.sum(np.log(loo)) - total)


def fallback_bandwidth(p: PointPattern) -> float:
    """Upper end diag/4 of the cross-validation interval, used below two points."""
    return p.window.diagonal / 4.0


def likelihood_cv_bandwidth(p: PointPattern, edge_correction: EdgeCorrection = EdgeCorrection.UNIFORM) -> float:
    """
    Bandwidth maximising the likelihood cross-validation score on
    [max(d_min, diag/1000), diag/4].
    """
    if p.n < 2:
        raise InsufficientPointsError(2, p.n, what="likelihood cross-validation bandwidth")
    condensed = pdist(p.points)
    diag = p.window.diagonal
    positive = condensed[condensed > 0]
    lower = max(float(positive.min()) if positive.size else 0.0, diag / 1000.0)
    upper = fallback_bandwidth(p)
    if lower >= upper:
        return upper
    distances = squareform(condensed)
    result = optimize.minimize_scalar(
        lambda h: -likelihood_cv_score(p, h, edge_correction, distances),
        bounds=(lower, upper),
        method='bounded',
    )
    logger.debug(f"Likelihood CV bandwidth {float(result.x):.5g} on [{lower:.4g}, {upper:.4g}]")
    return float(result.x)


def kernel_intensity(
    p: PointPattern,
    bandwidth: Union[float, str, None] = None,
    nx: int = DEFAULT_RASTER,
    ny: int = DEFAULT_RASTER,
    edge_correction: Union[EdgeCorrection, str] = EdgeCorrection.UNIFORM,
) -> RasterSurface:
    """
    Edge-corrected Gaussian kernel estimate of the intensity.

    uniform: sum_i k_h(u - x_i) / c_W(u)
    diggle:  sum_i k_h(u - x_i) / c_W(x_i)

    Args:
        p: Pattern with at least one point
        bandwidth: Positive bandwidth, or None / 'auto' for likelihood cross-validation
            (diag/4 for a single point)
        nx, ny: Raster resolution
        edge_correction: uniform or diggle

    Raises:
        NoDataError: empty pattern
    """
    if p.n == 0:
        raise NoDataError("Kernel intensity needs at least one point")
    correction = EdgeCorrection(edge_correction)
    if bandwidth is None or bandwidth == 'auto':
        h = likelihood_cv_bandwidth(p, correction) if p.n >= 2 else fallback_bandwidth(p)
    else:
        h = _check_bandwidth(float(bandwidth))
    values = _kernel_surface(p, h, nx, ny, correction)
    return RasterSurface(p.window, nx, ny, values)
