"""Utility modules for the Penalised Intensity Estimation System."""
from .calculations import (
    trapezoid,
    derive_seed,
    mean_and_standard_error,
    pooled_standard_error,
    format_metric,
)

__all__ = [
    'trapezoid',
    'derive_seed',
    'mean_and_standard_error',
    'pooled_standard_error',
    'format_metric',
]
