"""
Exception hierarchy for the Penalised Intensity Estimation System.

Three families map onto the CLI exit codes:
    ConfigurationError -> 2
    DataError          -> 3
    NumericalError     -> 4
"""


class IntensityError(Exception):
    """Base class for all errors raised by the estimation pipeline."""

    exit_code = 1


# =============================================================================
# Configuration errors (exit code 2)
# =============================================================================

class ConfigurationError(IntensityError, ValueError):
    """Invalid settings, specs or command-line values."""

    exit_code = 2


class ParameterError(ConfigurationError):
    """A model or scenario parameter is outside its admissible range."""

    def __init__(self, name: str, value, constraint: str):
        self.name = name
        self.value = value
        self.constraint = constraint
        super().__init__(f"Parameter '{name}'={value!r} violates constraint: {constraint}")


class MissingCovariateError(ConfigurationError):
    """A covariate named in a model has no surface."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Covariate '{name}' has no surface")


class SchemaError(ConfigurationError):
    """A scenario or document does not match its schema."""


# =============================================================================
# Data errors (exit code 3)
# =============================================================================

class DataError(IntensityError, ValueError):
    """Input data cannot support the requested operation."""

    exit_code = 3


class OutOfDomainError(DataError):
    """A location lies outside the observation window."""


class InsufficientPointsError(DataError):
    """Too few points for the requested statistic."""

    def __init__(self, required: int, actual: int, what: str = "operation"):
        self.required = required
        self.actual = actual
        super().__init__(f"{what} needs at least {required} points, got {actual}")


class NoDataError(DataError):
    """An operation received an empty pattern."""


class GridMismatchError(DataError):
    """Two gridded objects do not share the same grid."""


class UndefinedWeightError(DataError):
    """Translation edge-correction weight is undefined for a displacement."""


class DegenerateTileError(DataError):
    """A quadrat tile carries zero fitted mass."""

    def __init__(self, row: int, col: int):
        self.row = row
        self.col = col
        super().__init__(f"Quadrat tile (row={row}, col={col}) has zero fitted mass")


# =============================================================================
# Numerical errors (exit code 4)
# =============================================================================

class NumericalError(IntensityError, ArithmeticError):
    """A numerical procedure failed."""

    exit_code = 4


class SingularIntegrandError(NumericalError):
    """Integrand divides by K_Pois(r) at r <= 0."""


class RankDeficiencyError(NumericalError):
    """The model design is rank deficient at the quadrature nodes."""

    def __init__(self, collinear):
        self.collinear = list(collinear)
        super().__init__(f"Singular Hessian: collinear covariates {self.collinear}")


class DominatingBoundError(NumericalError):
    """Thinning proposal exceeded the dominating intensity."""


class EmbeddingError(NumericalError):
    """Circulant embedding is not non-negative definite."""
