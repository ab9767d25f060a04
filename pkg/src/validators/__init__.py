"""Goodness-of-fit measurement."""
from .gof_validator import (
    GoodnessOfFitValidator,
    QuadratPartition,
    integrated_squared_error,
    mise,
    pearson_chi2,
)

__all__ = [
    'GoodnessOfFitValidator',
    'QuadratPartition',
    'integrated_squared_error',
    'mise',
    'pearson_chi2',
]
