"""
Source package initialization.
"""
from src.enums import DiscrepancyKind, InterpolationMethod, OffsetMode, ScenarioFamily
from src.errors import IntensityError, ConfigurationError, DataError, NumericalError

__all__ = [
    'DiscrepancyKind', 'InterpolationMethod', 'OffsetMode', 'ScenarioFamily',
    'IntensityError', 'ConfigurationError', 'DataError', 'NumericalError',
]
