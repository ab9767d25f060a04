"""
Maximum (penalised) Poisson likelihood for log-linear intensity models.

The objective on a quadrature scheme is

    L(theta) = sum_data (Z theta + o_data) - sum_nodes w exp(Z theta + o_int)

where the offsets are log phi* on the terms they act on. It is maximised by
damped Newton iterations with step halving.
"""
import logging
from dataclasses import dataclass
from typing import List, Mapping, Optional

import numpy as np

from src.core import ObservationWindow, PointPattern
from src.enums import OffsetMode
from src.errors import NoDataError, RankDeficiencyError
from src.fit.model import Covariate, ModelSpec, design_matrix, resolve_covariates
from src.fit.quadrature import QuadratureScheme, make_quadrature

logger = logging.getLogger(__name__)

GRADIENT_TOL = 1e-8
OBJECTIVE_TOL = 1e-10
MAX_ITERATIONS = 100
MAX_HALVINGS = 30


@dataclass(frozen=True, eq=False)
class FitResult:
    """
    Attributes:
        theta: Coefficients, intercept first
        covariance: Inverse negative Hessian at theta
        log_likelihood: Maximised quadrature objective
        model: Model specification that was fitted
        converged: Whether a convergence criterion was met
        iterations: Newton iterations performed
        penalty: sum_data log phi*(x) + sum_nodes w nu(node) (1 - phi*(node))
        n_points: Number of data points
        window: Observation window of the data
        covariates: Covariates used (kept for prediction)
    """

    theta: np.ndarray
    covariance: np.ndarray
    log_likelihood: float
    model: ModelSpec
    converged: bool
    iterations: int
    penalty: float
    n_points: int
    window: ObservationWindow
    covariates: Mapping[str, Covariate]

    @property
    def aic(self) -> float:
        return 2 * len(self.theta) - 2 * self.log_likelihood

    @property
    def parameter_names(self) -> List[str]:
        return ['(Intercept)'] + list(self.model.covariate_names)

    @property
    def standard_errors(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.covariance), 0.0, None))

    def coefficients(self) -> dict:
        return dict(zip(self.parameter_names, (float(v) for v in self.theta)))


# =============================================================================
# Offsets and checks
# =============================================================================

def _node_offsets(model: ModelSpec, q: QuadratureScheme):
    """Log-offsets on the data term (data nodes) and on the integral term (all nodes)."""
    n = q.n_data
    if model.offset_mode == OffsetMode.NONE:
        return np.zeros(n), np.zeros(q.n_nodes)
    if model.offset_mode == OffsetMode.INDICATOR:
        if model.point_offsets.shape[0] != n:
            raise NoDataError(f"{model.point_offsets.shape[0]} point offsets for {n} data points")
        return np.log(model.point_offsets), np.zeros(q.n_nodes)
    integral = model.log_offset_surface(q.nodes)
    return integral[:n].copy(), integral


def _collinear_columns(names: List[str], weighted: np.ndarray) -> List[str]:
    """Columns that add no rank when added left to right."""
    collinear, rank = [], 0
    for j, name in enumerate(names):
        new_rank = np.linalg.matrix_rank(weighted[:, :j + 1])
        if new_rank == rank:
            collinear.append(name)
        rank = new_rank
    return collinear


def _check_rank(names: List[str], z: np.ndarray, weights: np.ndarray) -> None:
    weighted = z * np.sqrt(weights)[:, None]
    if np.linalg.matrix_rank(weighted) < z.shape[1]:
        raise RankDeficiencyError(_collinear_columns(names, weighted))


# =============================================================================
# Fitting
# =============================================================================

def fit_poisson(
    p: PointPattern,
    covariates: Optional[Mapping[str, Covariate]] = None,
    model: Optional[ModelSpec] = None,
    q: Optional[QuadratureScheme] = None,
    max_iterations: int = MAX_ITERATIONS,
    gradient_tol: float = GRADIENT_TOL,
    objective_tol: float = OBJECTIVE_TOL,
) -> FitResult:
    """
    Fit a log-linear Poisson intensity, optionally weighted by phi*.

    Args:
        p: Data pattern (non-empty)
        covariates: Named covariate surfaces or functions; coordinate
            covariates x, y, x2, y2 are available by name without supplying them
        model: Model specification (default: intercept only, no offset)
        q: Quadrature scheme (default: make_quadrature(p))
        max_iterations: Newton iteration cap
        gradient_tol: Max-norm gradient tolerance
        objective_tol: Relative objective-change tolerance

    Returns:
        FitResult; converged=False with the last iterate when the cap is hit

    Raises:
        NoDataError: empty pattern
        MissingCovariateError: a named covariate has no surface
        RankDeficiencyError: collinear design at the quadrature nodes
    """
    if p.n == 0:
        raise NoDataError("Cannot fit a Poisson model to an empty pattern")
    model = model or ModelSpec()
    q = q or make_quadrature(p)
    resolved = resolve_covariates(model.covariate_names, p.window, covariates)
    names = ['(Intercept)'] + list(model.covariate_names)

    z = design_matrix(model.covariate_names, resolved, q.nodes)
    z_data = z[:q.n_data]
    data_sum = z_data.sum(axis=0)
    off_data, off_int = _node_offsets(model, q)
    w = q.weights
    _check_rank(names, z, w)

    def objective(theta: np.ndarray) -> float:
        return float(data_sum @ theta + off_data.sum() - w @ np.exp(z @ theta + off_int))

    theta = np.zeros(z.shape[1])
    theta[0] = np.log(p.n / float(w @ np.exp(off_int)))
    value = objective(theta)
    converged = False
    iteration = 0

    while iteration < max_iterations:
        mu = w * np.exp(z @ theta + off_int)
        gradient = data_sum - z.T @ mu
        if np.max(np.abs(gradient)) < gradient_tol:
            converged = True
            break
        information = (z * mu[:, None]).T @ z
        step = np.linalg.solve(information, gradient)
        iteration += 1

        accepted = False
        for halving in range(MAX_HALVINGS + 1):
            candidate = theta + step
            candidate_value = objective(candidate)
            if np.isfinite(candidate_value) and candidate_value >= value - 1e-12 * max(abs(value), 1.0):
                accepted = True
                break
            logger.debug(f"Newton iteration {iteration}: halving step ({halving + 1})")
            step = 0.5 * step
        if not accepted:
            logger.warning(f"Newton iteration {iteration}: no ascent after {MAX_HALVINGS} halvings")
            break

        if candidate_value < value:
            # rounding-level change at the optimum
            converged = True
            break
        change = abs(candidate_value - value) / max(abs(value), 1.0)
        theta, value = candidate, candidate_value
        if change < objective_tol:
            converged = True
            break

    if not converged:
        logger.warning(f"Poisson fit did not converge after {iteration} iterations (model={model.label or names})")

    mu = w * np.exp(z @ theta + off_int)
    information = (z * mu[:, None]).T @ z
    try:
        covariance = np.linalg.inv(information)
    except np.linalg.LinAlgError as e:
        raise RankDeficiencyError(_collinear_columns(names, z * np.sqrt(w)[:, None])) from e
    covariance = 0.5 * (covariance + covariance.T)

    weighted_nu = w * np.exp(z @ theta)
    penalty = float(off_data.sum() + weighted_nu @ (1.0 - np.exp(off_int)))

    logger.debug(
        f"Poisson fit ({model.label or 'model'}): theta={np.round(theta, 6).tolist()}, "
        f"logL={value:.6f}, iterations={iteration}, converged={converged}"
    )
    return FitResult(
        theta=theta,
        covariance=covariance,
        log_likelihood=value,
        model=model,
        converged=converged,
        iterations=iteration,
        penalty=penalty,
        n_points=p.n,
        window=p.window,
        covariates=resolved,
    )
