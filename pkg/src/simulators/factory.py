"""
Simulator Factory - scenario dispatch.

Maps each scenario family to its simulator class and builds simulators from
ScenarioSpec documents.
"""
import logging
from typing import Any, Dict, List

from src.core import PointPattern
from src.enums import ScenarioFamily
from src.errors import ConfigurationError
from src.schemas import ScenarioSpec

from .base_simulator import PointProcessSimulator
from .lgcp_simulator import LGCPSimulator
from .poisson_simulator import PoissonHomogSimulator, PoissonLinearSimulator, PoissonModulatedSimulator
from .strauss_simulator import StraussSimulator
from .thomas_simulator import ThomasSimulator

logger = logging.getLogger(__name__)


# Registry of scenario simulators
# Format: 'family': {
#     'class': SimulatorClass,
#     'parameter_mapper': function mapping spec parameters to simulator kwargs
# }
SIMULATOR_REGISTRY: Dict[ScenarioFamily, Dict[str, Any]] = {
    ScenarioFamily.POISSON_HOMOG: {
        'class': PoissonHomogSimulator,
        'parameter_mapper': lambda params: dict(params),
    },
    ScenarioFamily.POISSON_LINEAR: {
        'class': PoissonLinearSimulator,
        'parameter_mapper': lambda params: dict(params),
    },
    ScenarioFamily.POISSON_MODULATED: {
        'class': PoissonModulatedSimulator,
        'parameter_mapper': lambda params: dict(params),
    },
    ScenarioFamily.LGCP: {
        'class': LGCPSimulator,
        'parameter_mapper': lambda params: dict(params),
    },
    ScenarioFamily.THOMAS: {
        'class': ThomasSimulator,
        'parameter_mapper': lambda params: dict(params),
    },
    ScenarioFamily.STRAUSS: {
        'class': StraussSimulator,
        # integer-valued settings arrive as floats from JSON
        'parameter_mapper': lambda params: {
            k: (int(v) if k in ('iterations', 'pilot_chains', 'calibration_seed', 'trace_every') else v)
            for k, v in params.items()
        },
    },
}


class SimulatorFactory:
    """Factory for creating scenario simulators from specifications."""

    @staticmethod
    def create_simulator(spec: ScenarioSpec) -> PointProcessSimulator:
        """
        Build the simulator of a scenario.

        Args:
            spec: Scenario specification

        Returns:
            Initialised simulator

        Raises:
            ConfigurationError: unknown family or invalid parameters
        """
        family = ScenarioFamily(spec.family)
        if family not in SIMULATOR_REGISTRY:
            raise ConfigurationError(f"Unknown scenario family: {family}")
        entry = SIMULATOR_REGISTRY[family]
        kwargs = entry['parameter_mapper'](spec.parameters)
        simulator = entry['class'](spec.observation_window(), **kwargs)
        logger.debug(f"{family.display_name} simulator initialised with {kwargs}")
        return simulator

    @staticmethod
    def get_supported_families() -> List[str]:
        return [family.value for family in SIMULATOR_REGISTRY]


def run_scenario(spec: ScenarioSpec) -> PointPattern:
    """Simulate one pattern of a scenario using its seed."""
    return SimulatorFactory.create_simulator(spec).simulate(spec.seed)
