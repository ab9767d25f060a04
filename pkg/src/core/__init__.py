"""Geometry, pattern and raster primitives."""
from .window import ObservationWindow, window_area
from .pattern import PointPattern, MarkedPattern
from .raster import RasterSurface, grid_centres, surface_at, surface_integral

__all__ = [
    'ObservationWindow',
    'window_area',
    'PointPattern',
    'MarkedPattern',
    'RasterSurface',
    'grid_centres',
    'surface_at',
    'surface_integral',
]
