"""
Named scenario presets of the replication study.
"""
from typing import Dict, List, Optional

from src.enums import ScenarioFamily
from src.errors import ConfigurationError
from src.schemas import ScenarioSpec, WindowDocument

_SIZES = (125, 250, 500)
_LINEAR_SLOPES = {125: 240.0, 250: 480.0, 500: 960.0}

PRESETS: Dict[str, Dict] = {}

for _size in _SIZES:
    PRESETS[f'poisson_homog_{_size}'] = {
        'family': ScenarioFamily.POISSON_HOMOG, 'parameters': {'rho': float(_size)},
    }
    PRESETS[f'poisson_linear_{_size}'] = {
        'family': ScenarioFamily.POISSON_LINEAR, 'parameters': {'intercept': 10.0, 'alpha': _LINEAR_SLOPES[_size]},
    }
    PRESETS[f'poisson_modulated_{_size}'] = {
        'family': ScenarioFamily.POISSON_MODULATED, 'parameters': {'alpha': float(_size), 'beta': 100.0},
    }
    PRESETS[f'lgcp_homog_{_size}'] = {
        'family': ScenarioFamily.LGCP,
        'parameters': {'target_count': float(_size), 'sigma2': 0.15, 'beta': 0.5, 'approximate_embedding': 1.0},
    }
    PRESETS[f'lgcp_inhom_{_size}'] = {
        'family': ScenarioFamily.LGCP,
        'parameters': {
            'target_count': float(_size), 'sigma2': 0.15, 'beta': 0.5, 'trend': 1.0, 'approximate_embedding': 1.0,
        },
    }

# strongly clustered LGCP scaled to desk-size patterns
PRESETS['lgcp_clustered_125'] = {
    'family': ScenarioFamily.LGCP,
    'parameters': {'target_count': 125.0, 'sigma2': 2.0, 'beta': 5.0, 'approximate_embedding': 1.0},
}

for _index, _kappa in enumerate((20.0, 25.0, 50.0), start=1):
    PRESETS[f'thomas_{_index}'] = {
        'family': ScenarioFamily.THOMAS,
        'parameters': {'kappa': _kappa, 'sigma': 0.2, 'mu': 5.0, 'mu_gradient': 2.0},
    }

for _index, (_gamma, _target) in enumerate(((0.3, 120.0), (0.5, 200.0), (0.7, 400.0)), start=1):
    PRESETS[f'strauss_{_index}'] = {
        'family': ScenarioFamily.STRAUSS,
        'parameters': {'gamma': _gamma, 'R': 0.05, 'target_count': _target},
    }


def list_presets() -> List[str]:
    return sorted(PRESETS)


def get_preset(name: str, seed: int = 0, window: Optional[WindowDocument] = None) -> ScenarioSpec:
    """
    ScenarioSpec of a named preset.

    Raises:
        ConfigurationError: unknown preset name
    """
    if name not in PRESETS:
        raise ConfigurationError(f"Unknown preset '{name}'; available: {', '.join(list_presets())}")
    entry = PRESETS[name]
    return ScenarioSpec(
        family=entry['family'],
        parameters=dict(entry['parameters']),
        window=window or WindowDocument(),
        seed=seed,
        name=name,
    )
