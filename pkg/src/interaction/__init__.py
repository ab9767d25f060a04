"""Interaction weights from local K-functions and their spatial extension."""
from .discrepancy import (
    DiscrepancySpec,
    discrepancy,
    discrepancy_values,
    phi_star_at_points,
)
from .interpolation import (
    InterpolationSpec,
    idw_at,
    kernel_smoother_at,
    lscv_score,
    lscv_bandwidth,
    resolve_bandwidth,
    interpolate_at,
    interpolate,
)

__all__ = [
    'DiscrepancySpec',
    'discrepancy',
    'discrepancy_values',
    'phi_star_at_points',
    'InterpolationSpec',
    'idw_at',
    'kernel_smoother_at',
    'lscv_score',
    'lscv_bandwidth',
    'resolve_bandwidth',
    'interpolate_at',
    'interpolate',
]
