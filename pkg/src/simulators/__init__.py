"""Seeded simulators for the study scenario families."""
from src.schemas import ScenarioSpec

from .base_simulator import PointProcessSimulator, as_generator, uniform_points
from .poisson_simulator import (
    PoissonHomogSimulator,
    PoissonLinearSimulator,
    PoissonModulatedSimulator,
    sim_poisson_homog,
    sim_poisson_inhom,
    thin,
)
from .lgcp_simulator import LGCPSimulator, circulant_eigenvalues, gaussian_field, sim_lgcp
from .thomas_simulator import ThomasSimulator, sim_thomas
from .strauss_simulator import (
    StraussChainResult,
    StraussSimulator,
    calibrate_beta_rate,
    close_pair_count,
    sim_strauss,
    strauss_chain,
)
from .factory import SIMULATOR_REGISTRY, SimulatorFactory, run_scenario
from .presets import PRESETS, get_preset, list_presets

__all__ = [
    'ScenarioSpec',
    'PointProcessSimulator',
    'as_generator',
    'uniform_points',
    'PoissonHomogSimulator',
    'PoissonLinearSimulator',
    'PoissonModulatedSimulator',
    'sim_poisson_homog',
    'sim_poisson_inhom',
    'thin',
    'LGCPSimulator',
    'circulant_eigenvalues',
    'gaussian_field',
    'sim_lgcp',
    'ThomasSimulator',
    'sim_thomas',
    'StraussChainResult',
    'StraussSimulator',
    'calibrate_beta_rate',
    'close_pair_count',
    'sim_strauss',
    'strauss_chain',
    'SIMULATOR_REGISTRY',
    'SimulatorFactory',
    'run_scenario',
    'PRESETS',
    'get_preset',
    'list_presets',
]
