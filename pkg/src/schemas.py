"""
Pydantic document models for every JSON file the pipeline reads or writes.

JSON Schemas of these models are exported by scripts/export_schemas.py.
"""
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core import ObservationWindow
from src.enums import MetricKind, ScenarioFamily


class WindowDocument(BaseModel):
    """Sidecar window file `<pattern>.window.json`."""
    model_config = ConfigDict(extra='forbid')

    x_min: float = 0.0
    x_max: float = 1.0
    y_min: float = 0.0
    y_max: float = 1.0

    @model_validator(mode='after')
    def _check_extent(self) -> 'WindowDocument':
        if not self.x_max > self.x_min:
            raise ValueError(f"x_max ({self.x_max}) must exceed x_min ({self.x_min})")
        if not self.y_max > self.y_min:
            raise ValueError(f"y_max ({self.y_max}) must exceed y_min ({self.y_min})")
        return self

    @classmethod
    def from_window(cls, window: ObservationWindow) -> 'WindowDocument':
        return cls(**window.to_dict())

    def to_window(self) -> ObservationWindow:
        return ObservationWindow(self.x_min, self.x_max, self.y_min, self.y_max)


class ScenarioSpec(BaseModel):
    """
    Simulation scenario: family, per-family parameters, window and seed.

    Flags such as `trend` or `approximate_embedding` are given as 0/1.
    """
    model_config = ConfigDict(extra='forbid')

    family: ScenarioFamily
    parameters: Dict[str, float] = Field(default_factory=dict)
    window: WindowDocument = Field(default_factory=WindowDocument)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    name: Optional[str] = None

    def with_seed(self, seed: int) -> 'ScenarioSpec':
        return self.model_copy(update={'seed': int(seed)})

    def observation_window(self) -> ObservationWindow:
        return self.window.to_window()


# =============================================================================
# Output documents
# =============================================================================

class LocalKDocument(BaseModel):
    """Local and global K-functions of one pattern."""
    r_values: List[float]
    local_k: List[List[float]]
    global_k: List[float]
    k_pois: List[float]
    n_points: int
    window: WindowDocument
    config: Dict[str, Any] = Field(default_factory=dict)


class PhiStarDocument(BaseModel):
    """Summary of point-level interaction weights and the offset surface built from them."""
    discrepancy: str
    exponent: float
    signed: bool
    interpolation: str
    bandwidth: Optional[float] = None
    n_points: int
    median: float
    minimum: float
    maximum: float
    marks_file: str
    surface_file: str
    config: Dict[str, Any] = Field(default_factory=dict)


class ModelDocument(BaseModel):
    covariates: List[str]
    offset_mode: str
    label: str = ''


class FitResultDocument(BaseModel):
    """Fitted coefficients and likelihood summaries."""
    theta: Dict[str, float]
    standard_errors: Dict[str, float]
    covariance: List[List[float]]
    log_likelihood: float
    aic: float
    penalty: float
    converged: bool
    iterations: int
    n_points: int
    model: ModelDocument
    config: Dict[str, Any] = Field(default_factory=dict)


class ChiSquareDocument(BaseModel):
    """Pearson quadrat statistic of a fitted surface."""
    statistic: float
    rows: int
    cols: int
    n_points: int
    fitted_mass: float
    config: Dict[str, Any] = Field(default_factory=dict)


class MethodSummary(BaseModel):
    """One method row of a study report."""
    method: str
    mean: Optional[float] = None
    standard_error: Optional[float] = None
    replicates_used: int
    excluded: int = 0
    paired_difference: Optional[float] = None
    paired_difference_se: Optional[float] = None


class StudyReportDocument(BaseModel):
    """Replication study summary, one row per method."""
    scenario: ScenarioSpec
    metric: MetricKind
    replicates: int = Field(ge=1)
    methods: List[MethodSummary]
    quadrats: Optional[List[int]] = None
    raster: List[int]
    config: Dict[str, Any] = Field(default_factory=dict)


class SimulationManifest(BaseModel):
    """Written next to simulated replicates."""
    scenario: ScenarioSpec
    replicates: int = Field(ge=1)
    seeds: List[int]
    files: List[str]
    counts: List[int]
    config: Dict[str, Any] = Field(default_factory=dict)


class AICEntry(BaseModel):
    label: str
    aic: float
    log_likelihood: float
    penalty: float
    converged: bool
    theta: Dict[str, float]


class AICComparisonDocument(BaseModel):
    """AIC comparison of the unpenalised and penalised fits of one pattern."""
    models: List[AICEntry]
    ordering: List[str]
    n_points: int
    config: Dict[str, Any] = Field(default_factory=dict)


DOCUMENT_MODELS = {
    'window': WindowDocument,
    'scenario': ScenarioSpec,
    'localk': LocalKDocument,
    'phistar': PhiStarDocument,
    'fit_result': FitResultDocument,
    'chi_square': ChiSquareDocument,
    'study_report': StudyReportDocument,
    'simulation_manifest': SimulationManifest,
    'aic_comparison': AICComparisonDocument,
}
