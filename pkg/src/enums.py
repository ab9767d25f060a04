"""
Enums for the Penalised Intensity Estimation System.
Provides type-safe constants for discrepancies, interpolation, offsets,
scenario families and study settings.
"""
from enum import Enum
from typing import Dict


class DiscrepancyKind(str, Enum):
    """Functional comparing a local K-function with the Poisson benchmark."""
    UNIFORM_METRIC = "uniform_metric"
    L2_METRIC = "l2_metric"
    EXP_SQUARED = "exp_squared"
    EXP_NORMALIZED = "exp_normalized"

    @classmethod
    def from_string(cls, value: str) -> "DiscrepancyKind":
        """
        Convert CLI/config spellings to DiscrepancyKind.

        Args:
            value: e.g. 'exp_normalized', 'uniform', 'L2', 'exp-squared'

        Returns:
            DiscrepancyKind enum value

        Raises:
            ValueError: unknown spelling
        """
        mapping: Dict[str, DiscrepancyKind] = {
            'uniform': cls.UNIFORM_METRIC,
            'uniform_metric': cls.UNIFORM_METRIC,
            'sup': cls.UNIFORM_METRIC,
            'l2': cls.L2_METRIC,
            'l2_metric': cls.L2_METRIC,
            'exp_squared': cls.EXP_SQUARED,
            'squared': cls.EXP_SQUARED,
            'exp_normalized': cls.EXP_NORMALIZED,
            'exp_normalised': cls.EXP_NORMALIZED,
            'normalized': cls.EXP_NORMALIZED,
        }
        key = value.strip().lower().replace('-', '_')
        if key not in mapping:
            raise ValueError(f"Unknown discrepancy kind: {value}")
        return mapping[key]

    @property
    def is_exponential(self) -> bool:
        """Whether the discrepancy is an exponential weight (strictly positive)."""
        return self in (DiscrepancyKind.EXP_SQUARED, DiscrepancyKind.EXP_NORMALIZED)


class InterpolationMethod(str, Enum):
    """Extension of point-level interaction weights to the window."""
    INDICATOR = "indicator"
    IDW = "idw"
    KERNEL = "kernel"

    @classmethod
    def from_string(cls, value: str) -> "InterpolationMethod":
        """Convert CLI/config spellings ('I', 'IDW', 'KS', 'kernel', ...) to InterpolationMethod."""
        mapping = {
            'i': cls.INDICATOR,
            'indicator': cls.INDICATOR,
            'idw': cls.IDW,
            'ks': cls.KERNEL,
            'kernel': cls.KERNEL,
            'nadaraya_watson': cls.KERNEL,
        }
        key = value.strip().lower().replace('-', '_')
        if key not in mapping:
            raise ValueError(f"Unknown interpolation method: {value}")
        return mapping[key]


class OffsetMode(str, Enum):
    """How the interaction weight enters the Poisson likelihood."""
    NONE = "none"
    INDICATOR = "indicator"
    SURFACE = "surface"


class StudyMethod(str, Enum):
    """Fitting methods compared in the replication study."""
    NONE = "none"
    INDICATOR = "I"
    IDW = "IDW"
    KERNEL = "KS"

    @classmethod
    def from_string(cls, value: str) -> "StudyMethod":
        """Convert 'none', 'I', 'idw', 'ks', ... to StudyMethod."""
        mapping = {
            'none': cls.NONE,
            '-': cls.NONE,
            'unpenalised': cls.NONE,
            'i': cls.INDICATOR,
            'indicator': cls.INDICATOR,
            'idw': cls.IDW,
            'ks': cls.KERNEL,
            'kernel': cls.KERNEL,
        }
        key = value.strip().lower()
        if key not in mapping:
            raise ValueError(f"Unknown study method: {value}")
        return mapping[key]

    @property
    def interpolation(self) -> "InterpolationMethod":
        """Interpolation method backing this study method (None for unpenalised)."""
        return {
            StudyMethod.INDICATOR: InterpolationMethod.INDICATOR,
            StudyMethod.IDW: InterpolationMethod.IDW,
            StudyMethod.KERNEL: InterpolationMethod.KERNEL,
        }.get(self)

    @property
    def display_name(self) -> str:
        """Column label used in report tables."""
        return "unpenalised" if self == StudyMethod.NONE else self.value


class MetricKind(str, Enum):
    """Goodness-of-fit metric of a study."""
    MISE = "mise"
    CHI2 = "chi2"


class ScenarioFamily(str, Enum):
    """Simulation scenario families."""
    POISSON_HOMOG = "poisson_homog"
    POISSON_LINEAR = "poisson_linear"
    POISSON_MODULATED = "poisson_modulated"
    LGCP = "lgcp"
    THOMAS = "thomas"
    STRAUSS = "strauss"

    @property
    def has_tractable_intensity(self) -> bool:
        """Whether the true intensity is known in closed form (MISE is allowed)."""
        return self not in (ScenarioFamily.THOMAS, ScenarioFamily.STRAUSS)

    @property
    def display_name(self) -> str:
        """Human-readable name for tables."""
        display_map = {
            ScenarioFamily.POISSON_HOMOG: "Poisson (Homogeneous)",
            ScenarioFamily.POISSON_LINEAR: "Poisson (Inhomogeneous)",
            ScenarioFamily.POISSON_MODULATED: "Poisson (Modulated)",
            ScenarioFamily.LGCP: "LGCP",
            ScenarioFamily.THOMAS: "Thomas",
            ScenarioFamily.STRAUSS: "Strauss",
        }
        return display_map[self]


class EdgeCorrection(str, Enum):
    """Edge correction of the kernel intensity estimator."""
    UNIFORM = "uniform"
    DIGGLE = "diggle"


class OutputFormat(str, Enum):
    """Tabular output format."""
    JSON = "json"
    CSV = "csv"
