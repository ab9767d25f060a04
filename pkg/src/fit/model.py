"""
Model specifications: covariates and offsets of log-linear intensity models.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from src.core import MarkedPattern, ObservationWindow, RasterSurface
from src.enums import OffsetMode, StudyMethod
from src.errors import MissingCovariateError, ParameterError
from src.interaction import InterpolationSpec, interpolate

logger = logging.getLogger(__name__)

OFFSET_FLOOR = 1e-10

# A covariate is a raster or a vectorised function f(x, y)
Covariate = Union[RasterSurface, Callable[[np.ndarray, np.ndarray], np.ndarray]]


# =============================================================================
# Coordinate covariates
# =============================================================================

def coordinate_covariates(window: ObservationWindow) -> Dict[str, Callable]:
    """
    Built-in trend covariates: x, y and squared centred coordinates x2, y2.
    """
    cx = 0.5 * (window.x_min + window.x_max)
    cy = 0.5 * (window.y_min + window.y_max)
    return {
        'x': lambda x, y: np.asarray(x, dtype=float),
        'y': lambda x, y: np.asarray(y, dtype=float),
        'x2': lambda x, y: np.square(np.asarray(x, dtype=float) - cx),
        'y2': lambda x, y: np.square(np.asarray(y, dtype=float) - cy),
    }


def resolve_covariates(
    names: Sequence[str],
    window: ObservationWindow,
    supplied: Optional[Mapping[str, Covariate]] = None,
) -> Dict[str, Covariate]:
    """
    Covariates for `names`, preferring supplied surfaces over built-in coordinates.

    Raises:
        MissingCovariateError: a name has neither a supplied nor a built-in covariate
    """
    supplied = dict(supplied or {})
    builtin = coordinate_covariates(window)
    resolved = {}
    for name in names:
        if name in supplied:
            resolved[name] = supplied[name]
        elif name in builtin:
            resolved[name] = builtin[name]
        else:
            raise MissingCovariateError(name)
    return resolved


def evaluate_covariate(cov: Covariate, points: np.ndarray) -> np.ndarray:
    points = np.atleast_2d(points)
    if isinstance(cov, RasterSurface):
        return cov.values_at(points)
    return np.broadcast_to(np.asarray(cov(points[:, 0], points[:, 1]), dtype=float), (points.shape[0],))


def design_matrix(names: Sequence[str], covariates: Mapping[str, Covariate], points: np.ndarray) -> np.ndarray:
    """Intercept column followed by one column per covariate name."""
    columns = [np.ones(np.atleast_2d(points).shape[0])]
    for name in names:
        if name not in covariates:
            raise MissingCovariateError(name)
        columns.append(evaluate_covariate(covariates[name], points))
    return np.column_stack(columns)


# =============================================================================
# Model specification
# =============================================================================

@dataclass(frozen=True, eq=False)
class ModelSpec:
    """
    Log-linear intensity model with an optional fixed interaction offset.

    Attributes:
        covariate_names: Covariates after the intercept
        offset_mode: none, indicator (point-level weights on the data term only)
            or surface (offset surface on both terms)
        offset_surface: B(u) for surface mode
        point_offsets: phi*(x_i) for indicator mode
        label: Display label (e.g. the study method)
    """

    covariate_names: Tuple[str, ...] = ()
    offset_mode: OffsetMode = OffsetMode.NONE
    offset_surface: Optional[RasterSurface] = None
    point_offsets: Optional[np.ndarray] = None
    label: str = field(default='')

    def __post_init__(self):
        object.__setattr__(self, 'covariate_names', tuple(self.covariate_names))
        object.__setattr__(self, 'offset_mode', OffsetMode(self.offset_mode))
        if self.offset_mode == OffsetMode.SURFACE:
            if self.offset_surface is None:
                raise ParameterError('offset_surface', None, "required when offset_mode=surface")
            if np.any(self.offset_surface.values < 0):
                raise ParameterError('offset_surface', float(self.offset_surface.values.min()), "values >= 0")
            if np.any(self.offset_surface.values <= 0):
                logger.warning(f"Offset surface has non-positive cells; flooring at {OFFSET_FLOOR}")
        if self.offset_mode == OffsetMode.INDICATOR:
            if self.point_offsets is None:
                raise ParameterError('point_offsets', None, "required when offset_mode=indicator")
            offsets = np.array(self.point_offsets, dtype=float).reshape(-1)
            if not np.all(offsets > 0):
                raise ParameterError('point_offsets', float(offsets.min()), "all > 0")
            offsets.setflags(write=False)
            object.__setattr__(self, 'point_offsets', offsets)

    def log_offset_surface(self, points: np.ndarray) -> np.ndarray:
        return np.log(np.maximum(self.offset_surface.values_at(points), OFFSET_FLOOR))

    def describe(self) -> Dict[str, object]:
        return {
            'covariates': list(self.covariate_names),
            'offset_mode': self.offset_mode.value,
            'label': self.label,
        }


def offset_model(
    method: StudyMethod,
    marks: Optional[MarkedPattern],
    covariate_names: Sequence[str] = (),
    interpolation: Optional[InterpolationSpec] = None,
    nx: int = 128,
    ny: int = 128,
) -> ModelSpec:
    """
    ModelSpec for one of the compared methods (unpenalised, I, IDW, KS).

    Args:
        method: Study method
        marks: phi* marks of the pattern (unused for the unpenalised method)
        covariate_names: Trend covariates
        interpolation: Settings for IDW power / kernel bandwidth
        nx, ny: Offset raster resolution
    """
    method = StudyMethod(method)
    if method == StudyMethod.NONE:
        return ModelSpec(covariate_names, OffsetMode.NONE, label=method.display_name)
    if method == StudyMethod.INDICATOR:
        return ModelSpec(covariate_names, OffsetMode.INDICATOR, point_offsets=marks.marks, label=method.display_name)
    base = interpolation or InterpolationSpec()
    spec = InterpolationSpec(method.interpolation, base.idw_power, base.kernel_bandwidth)
    surface = interpolate(marks, spec, nx, ny)
    return ModelSpec(covariate_names, OffsetMode.SURFACE, offset_surface=surface, label=method.display_name)

