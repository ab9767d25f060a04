"""
Configuration loader for the Penalised Intensity Estimation System.

Precedence: command-line flags > config file > module defaults.
"""
import logging
import os
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Dict, List, Optional

import yaml

from src.enums import DiscrepancyKind, EdgeCorrection, InterpolationMethod, MetricKind, OutputFormat, StudyMethod
from src.errors import ConfigurationError, ParameterError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = "config.yaml"
THREADS_ENV_VAR = "PENALISED_INTENSITY_THREADS"
OFFSET_CHOICES = ('none', 'indicator', 'idw', 'kernel')


# =============================================================================
# Settings sections
# =============================================================================

@dataclass
class LocalStatsSettings:
    """Radius grid of the local K-functions (None: derived from the window)."""
    radius_count: int = 100
    r_max: Optional[float] = None
    r0: Optional[float] = None


@dataclass
class InteractionSettings:
    """Discrepancy and interpolation of the interaction weights."""
    discrepancy: str = DiscrepancyKind.EXP_NORMALIZED.value
    exponent: float = 2.0
    signed: bool = False
    interpolation: str = InterpolationMethod.IDW.value
    idw_power: float = 2.0
    kernel_bandwidth: Optional[float] = None


@dataclass
class FitSettings:
    """Quadrature, optimiser and diagnostic-surface settings."""
    dummy_per_side: Optional[int] = None
    max_iterations: int = 100
    gradient_tol: float = 1e-8
    objective_tol: float = 1e-10
    residual_bandwidth: Optional[float] = None
    intensity_bandwidth: Optional[float] = None
    edge_correction: str = EdgeCorrection.UNIFORM.value


@dataclass
class RasterSettings:
    nx: int = 128
    ny: int = 128


@dataclass
class SimulationSettings:
    replicates: int = 1


@dataclass
class StudySettings:
    replicates: int = 100
    methods: List[str] = field(default_factory=lambda: [m.value for m in StudyMethod])
    metric: str = MetricKind.MISE.value
    quadrat_rows: int = 5
    quadrat_cols: int = 5


@dataclass
class RuntimeSettings:
    seed: int = 0
    threads: int = 1
    format: str = OutputFormat.JSON.value
    log_level: str = "INFO"


def _section(cls, values: Optional[Dict[str, Any]], name: str):
    """Fill a settings dataclass from a config section, rejecting unknown keys."""
    values = values or {}
    if not isinstance(values, dict):
        raise ConfigurationError(f"Config section '{name}' must be a mapping")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigurationError(f"Unknown key(s) {unknown} in config section '{name}'")
    return cls(**values)


class Config:
    """Configuration manager for loading and accessing settings."""

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize configuration.

        Args:
            config_path: Path to the configuration YAML file. When omitted,
                config.yaml is used if present and defaults apply otherwise.
        """
        self.config_path = config_path
        self.config = self._load_config()

    def _load_config(self) -> Dict[str, Any]:
        """Load configuration from YAML file."""
        path = self.config_path
        if path is None:
            if not os.path.exists(DEFAULT_CONFIG_PATH):
                return {}
            path = DEFAULT_CONFIG_PATH
        if not os.path.exists(path):
            raise FileNotFoundError(
                f"Configuration file not found: {path}\n"
                f"Please copy config.yaml.example to config.yaml and configure it."
            )
        with open(path, 'r') as f:
            data = yaml.safe_load(f) or {}
        if not isinstance(data, dict):
            raise ConfigurationError(f"Configuration file {path} must contain a mapping")
        logger.debug(f"Loaded configuration from {path}")
        return data

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get configuration value by key.

        Args:
            key: Configuration key (supports nested keys with dots, e.g., 'fit.dummy_per_side')
            default: Default value if key not found

        Returns:
            Configuration value
        """
        keys = key.split('.')
        value = self.config

        for k in keys:
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default

        return value

    def get_localstats_config(self) -> LocalStatsSettings:
        """Get radius-grid settings."""
        return _section(LocalStatsSettings, self.config.get('localstats'), 'localstats')

    def get_interaction_config(self) -> InteractionSettings:
        """Get discrepancy and interpolation settings."""
        return _section(InteractionSettings, self.config.get('interaction'), 'interaction')

    def get_fit_config(self) -> FitSettings:
        """Get quadrature and optimiser settings."""
        return _section(FitSettings, self.config.get('fit'), 'fit')

    def get_raster_config(self) -> RasterSettings:
        """Get raster resolution (default: 128 x 128)."""
        return _section(RasterSettings, self.config.get('raster'), 'raster')

    def get_simulation_config(self) -> SimulationSettings:
        return _section(SimulationSettings, self.config.get('simulation'), 'simulation')

    def get_study_config(self) -> StudySettings:
        """Get replication-study settings."""
        return _section(StudySettings, self.config.get('study'), 'study')

    def get_runtime_config(self) -> RuntimeSettings:
        """
        Get runtime settings.

        The thread count defaults to the PENALISED_INTENSITY_THREADS environment
        variable when the config file does not set it.
        """
        runtime = _section(RuntimeSettings, self.config.get('runtime'), 'runtime')
        if 'threads' not in (self.config.get('runtime') or {}) and os.environ.get(THREADS_ENV_VAR):
            try:
                runtime.threads = int(os.environ[THREADS_ENV_VAR])
            except ValueError:
                raise ParameterError(THREADS_ENV_VAR, os.environ[THREADS_ENV_VAR], "integer")
        return runtime


# =============================================================================
# Effective run configuration
# =============================================================================

# CLI argument name -> (section, field)
_FLAG_MAP = {
    'radius_count': ('localstats', 'radius_count'),
    'r_max': ('localstats', 'r_max'),
    'r0': ('localstats', 'r0'),
    'discrepancy': ('interaction', 'discrepancy'),
    'exponent': ('interaction', 'exponent'),
    'signed': ('interaction', 'signed'),
    'interpolation': ('interaction', 'interpolation'),
    'idw_power': ('interaction', 'idw_power'),
    'bandwidth': ('interaction', 'kernel_bandwidth'),
    'dummy_grid': ('fit', 'dummy_per_side'),
    'max_iterations': ('fit', 'max_iterations'),
    'residual_bandwidth': ('fit', 'residual_bandwidth'),
    'intensity_bandwidth': ('fit', 'intensity_bandwidth'),
    'edge_correction': ('fit', 'edge_correction'),
    'nx': ('raster', 'nx'),
    'ny': ('raster', 'ny'),
    'replicates': ('study', 'replicates'),
    'metric': ('study', 'metric'),
    'quadrat_rows': ('study', 'quadrat_rows'),
    'quadrat_cols': ('study', 'quadrat_cols'),
    'seed': ('runtime', 'seed'),
    'threads': ('runtime', 'threads'),
    'format': ('runtime', 'format'),
    'log_level': ('runtime', 'log_level'),
}


@dataclass
class RunConfig:
    """All tunables of one CLI invocation after merging flags, file and defaults."""
    subcommand: str
    paths: Dict[str, Optional[str]]
    localstats: LocalStatsSettings
    interaction: InteractionSettings
    fit: FitSettings
    raster: RasterSettings
    simulation: SimulationSettings
    study: StudySettings
    runtime: RuntimeSettings
    offset: str = 'none'
    covariates: Dict[str, Optional[str]] = field(default_factory=dict)
    seed_override: Optional[int] = None

    @classmethod
    def from_sources(cls, args, config: Config) -> "RunConfig":
        """
        Merge parsed CLI arguments over the config file over defaults.

        Args:
            args: argparse Namespace (flags left at None are not applied)
            config: Loaded Config

        Returns:
            Validated RunConfig
        """
        sections = {
            'localstats': config.get_localstats_config(),
            'interaction': config.get_interaction_config(),
            'fit': config.get_fit_config(),
            'raster': config.get_raster_config(),
            'simulation': config.get_simulation_config(),
            'study': config.get_study_config(),
            'runtime': config.get_runtime_config(),
        }
        supplied = vars(args)
        for flag, (section, name) in _FLAG_MAP.items():
            value = supplied.get(flag)
            if value is None or value is False:
                continue
            sections[section] = replace(sections[section], **{name: value})
        if supplied.get('methods'):
            methods = [m.strip() for m in str(supplied['methods']).split(',') if m.strip()]
            sections['study'] = replace(sections['study'], methods=methods)
        if supplied.get('replicates') is not None:
            sections['simulation'] = replace(sections['simulation'], replicates=supplied['replicates'])

        path_keys = ('pattern', 'window', 'scenario', 'preset', 'out', 'offset_surface', 'fitted', 'marks')
        paths = {key: supplied.get(key) for key in path_keys if supplied.get(key) is not None}
        covariates = {}
        for item in supplied.get('covariate') or []:
            name, _, source = str(item).partition('=')
            if not name.strip():
                raise ConfigurationError(f"Invalid --covariate value: {item!r} (expected name or name=path)")
            covariates[name.strip()] = source.strip() or None
        run_config = cls(subcommand=supplied.get('command') or '', paths=paths, **sections,
                         offset=supplied.get('offset') or 'none', covariates=covariates,
                         seed_override=supplied.get('seed'))
        run_config.validate()
        return run_config

    def validate(self) -> None:
        """Check enumerations and module preconditions, naming the offending field."""
        try:
            DiscrepancyKind.from_string(self.interaction.discrepancy)
            InterpolationMethod.from_string(self.interaction.interpolation)
            EdgeCorrection(self.fit.edge_correction)
            MetricKind(self.study.metric)
            OutputFormat(self.runtime.format)
            for method in self.study.methods:
                StudyMethod.from_string(method)
            if self.offset not in OFFSET_CHOICES:
                raise ValueError(f"Unknown offset: {self.offset} (choose from {', '.join(OFFSET_CHOICES)})")
        except ValueError as e:
            raise ConfigurationError(str(e)) from e
        checks = [
            ('localstats.radius_count', self.localstats.radius_count, self.localstats.radius_count >= 2, ">= 2"),
            ('interaction.exponent', self.interaction.exponent, self.interaction.exponent > 0, "> 0"),
            ('interaction.idw_power', self.interaction.idw_power, self.interaction.idw_power > 0, "> 0"),
            ('raster.nx', self.raster.nx, self.raster.nx >= 1, ">= 1"),
            ('raster.ny', self.raster.ny, self.raster.ny >= 1, ">= 1"),
            ('study.replicates', self.study.replicates, self.study.replicates >= 1, ">= 1"),
            ('simulation.replicates', self.simulation.replicates, self.simulation.replicates >= 1, ">= 1"),
            ('runtime.threads', self.runtime.threads, self.runtime.threads >= 1, ">= 1"),
            ('fit.max_iterations', self.fit.max_iterations, self.fit.max_iterations >= 1, ">= 1"),
        ]
        if self.fit.dummy_per_side is not None:
            checks.append(('fit.dummy_per_side', self.fit.dummy_per_side, self.fit.dummy_per_side >= 8, ">= 8"))
        if self.interaction.kernel_bandwidth is not None:
            checks.append(('interaction.kernel_bandwidth', self.interaction.kernel_bandwidth,
                           self.interaction.kernel_bandwidth > 0, "> 0"))
        for name, value, ok, constraint in checks:
            if not ok:
                raise ParameterError(name, value, constraint)

    def to_dict(self) -> Dict[str, Any]:
        """Effective configuration, echoed into every JSON output."""
        data = asdict(self)
        # thread count never changes results
        data['runtime'].pop('threads', None)
        data['runtime'].pop('log_level', None)
        return data
