"""Penalised Poisson likelihood fitting and fitted surfaces."""
from .quadrature import QuadratureScheme, default_dummy_per_side, make_quadrature
from .model import (
    OFFSET_FLOOR,
    ModelSpec,
    coordinate_covariates,
    design_matrix,
    offset_model,
    resolve_covariates,
)
from .poisson_fit import FitResult, fit_poisson
from .surfaces import (
    fallback_bandwidth,
    kernel_intensity,
    likelihood_cv_bandwidth,
    likelihood_cv_score,
    predict_intensity,
    smoothed_raw_residuals,
)

__all__ = [
    'QuadratureScheme',
    'default_dummy_per_side',
    'make_quadrature',
    'OFFSET_FLOOR',
    'ModelSpec',
    'coordinate_covariates',
    'design_matrix',
    'offset_model',
    'resolve_covariates',
    'FitResult',
    'fit_poisson',
    'fallback_bandwidth',
    'kernel_intensity',
    'likelihood_cv_bandwidth',
    'likelihood_cv_score',
    'predict_intensity',
    'smoothed_raw_residuals',
]
