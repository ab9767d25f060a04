"""
Strauss process simulator: birth-death Metropolis-Hastings.

Target density proportional to beta^n(x) * gamma^s_R(x), where s_R counts
pairs closer than R. Each step proposes a birth (uniform location) or a
death (uniform point) with probability 1/2.
"""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from src.core import ObservationWindow, PointPattern
from src.enums import ScenarioFamily
from src.errors import ConfigurationError, ParameterError
from src.simulators.base_simulator import PointProcessSimulator, SeedLike, as_generator
from src.utils.calculations import derive_seed

logger = logging.getLogger(__name__)

DEFAULT_ITERATIONS = 200_000
CALIBRATION_STEPS = 20
CALIBRATION_RTOL = 0.01


@dataclass
class StraussChainResult:
    """Final state of a chain plus the sampled close-pair trace."""
    pattern: PointPattern
    close_pair_trace: List[int] = field(default_factory=list)
    accepted: int = 0


def _validate(beta_rate: float, gamma: float, R: float, iterations: int) -> None:
    if not (np.isfinite(beta_rate) and beta_rate > 0):
        raise ParameterError('beta_rate', beta_rate, "> 0")
    if not (0.0 <= gamma <= 1.0):
        raise ParameterError('gamma', gamma, "0 <= gamma <= 1 (inhibitory range)")
    if not (np.isfinite(R) and R > 0):
        raise ParameterError('R', R, "> 0")
    if int(iterations) < 1:
        raise ParameterError('iterations', iterations, ">= 1")


def strauss_chain(
    beta_rate: float,
    gamma: float,
    R: float,
    iterations: int,
    w: ObservationWindow,
    seed: SeedLike = None,
    trace_every: Optional[int] = None,
) -> StraussChainResult:
    """
    Run a birth-death chain from the empty configuration.

    Args:
        beta_rate: Activity beta (> 0)
        gamma: Interaction parameter in [0, 1]
        R: Interaction radius (> 0)
        iterations: Number of proposals
        w: Observation window
        seed: Integer seed or Generator
        trace_every: Record the close-pair count every this many steps

    Returns:
        StraussChainResult with the final pattern
    """
    _validate(beta_rate, gamma, R, iterations)
    rng = as_generator(seed)
    iterations = int(iterations)
    activity = beta_rate * w.area
    r2 = R * R

    is_birth = rng.uniform(size=iterations) < 0.5
    acceptance = rng.uniform(size=iterations)
    picks = rng.uniform(size=iterations)
    births = np.column_stack([
        rng.uniform(w.x_min, w.x_max, size=iterations),
        rng.uniform(w.y_min, w.y_max, size=iterations),
    ])

    capacity = 256
    state = np.empty((capacity, 2))
    n = 0
    close_pairs = 0
    accepted = 0
    trace: List[int] = []

    for step in range(iterations):
        if is_birth[step]:
            u = births[step]
            if n:
                d = state[:n] - u
                t = int(np.count_nonzero(d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1] <= r2))
            else:
                t = 0
            weight = gamma ** t
            if weight > 0 and acceptance[step] < activity * weight / (n + 1):
                if n == capacity:
                    capacity *= 2
                    grown = np.empty((capacity, 2))
                    grown[:n] = state[:n]
                    state = grown
                state[n] = u
                n += 1
                close_pairs += t
                accepted += 1
        elif n:
            k = min(int(picks[step] * n), n - 1)
            d = state[:n] - state[k]
            t = int(np.count_nonzero(d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1] <= r2)) - 1
            weight = gamma ** t
            if weight == 0 or acceptance[step] < n / (activity * weight):
                state[k] = state[n - 1]
                n -= 1
                close_pairs -= t
                accepted += 1
        if trace_every and (step + 1) % trace_every == 0:
            trace.append(close_pairs)

    logger.debug(f"Strauss chain: {iterations} steps, {accepted} accepted, final n={n}, s_R={close_pairs}")
    return StraussChainResult(PointPattern(state[:n].copy(), w), trace, accepted)


def sim_strauss(
    beta_rate: float,
    gamma: float,
    R: float,
    iterations: int,
    w: ObservationWindow,
    seed: SeedLike = None,
) -> PointPattern:
    """Final state of a birth-death Strauss chain started empty."""
    return strauss_chain(beta_rate, gamma, R, iterations, w, seed).pattern


def close_pair_count(pattern: PointPattern, R: float) -> int:
    """Number of unordered pairs at distance <= R."""
    if pattern.n < 2:
        return 0
    return int(len(cKDTree(pattern.points).query_pairs(R)))


@lru_cache(maxsize=64)
def calibrate_beta_rate(
    target_count: float,
    gamma: float,
    R: float,
    window: ObservationWindow,
    iterations: int,
    pilot_chains: int,
    seed: int,
) -> float:
    """
    Activity beta whose chains have mean final count close to target_count.

    Bisection on log beta; pilot chains reuse the same seeds at every step so
    the estimated mean count is monotone in beta up to Monte Carlo noise.
    """
    seeds = [derive_seed(seed, i) for i in range(pilot_chains)]

    def mean_count(beta: float) -> float:
        return float(np.mean([sim_strauss(beta, gamma, R, iterations, window, s).n for s in seeds]))

    low = target_count / window.area
    if gamma == 1.0:
        return low
    high = 2.0 * low
    for _ in range(CALIBRATION_STEPS):
        if mean_count(high) >= target_count:
            break
        low, high = high, 2.0 * high
    else:
        raise ConfigurationError(f"Could not bracket a Strauss activity for target count {target_count}")

    beta = np.sqrt(low * high)
    for _ in range(CALIBRATION_STEPS):
        beta = np.sqrt(low * high)
        count = mean_count(beta)
        if abs(count - target_count) <= CALIBRATION_RTOL * target_count:
            break
        if count < target_count:
            low = beta
        else:
            high = beta
    logger.info(f"Calibrated Strauss activity beta={beta:.4f} for target count {target_count} (gamma={gamma}, R={R})")
    return float(beta)


class StraussSimulator(PointProcessSimulator):
    """
    Strauss process; beta_rate is given directly or calibrated to target_count.
    """

    FAMILY = ScenarioFamily.STRAUSS
    PARAMETER_DEFAULTS = {
        'R': 0.05,
        'beta_rate': None,
        'target_count': None,
        'iterations': DEFAULT_ITERATIONS,
        'pilot_chains': 8,
        'calibration_seed': 0,
        'trace_every': 0,
    }
    REQUIRED_PARAMETERS = ('gamma',)

    def validate_parameters(self) -> None:
        p = self.parameters
        if p['beta_rate'] is None and p['target_count'] is None:
            raise ConfigurationError("Strauss scenario needs beta_rate or target_count")
        if p['target_count'] is not None:
            self._require_positive('target_count', p['target_count'])
        _validate(p['beta_rate'] or 1.0, p['gamma'], p['R'], p['iterations'])

    def beta_rate(self) -> float:
        p = self.parameters
        if p['beta_rate'] is not None:
            return float(p['beta_rate'])
        return calibrate_beta_rate(
            float(p['target_count']), float(p['gamma']), float(p['R']), self.window,
            int(p['iterations']), int(p['pilot_chains']), int(p['calibration_seed']),
        )

    def run_chain(self, seed: SeedLike) -> StraussChainResult:
        p = self.parameters
        return strauss_chain(
            self.beta_rate(), p['gamma'], p['R'], int(p['iterations']), self.window, seed,
            trace_every=int(p['trace_every']) or None,
        )

    def simulate(self, seed: SeedLike) -> PointPattern:
        return self.run_chain(seed).pattern

    def expected_count(self) -> Optional[float]:
        p = self.parameters
        if p['target_count'] is not None:
            return float(p['target_count'])
        return float(p['beta_rate']) * self.window.area if p['gamma'] == 1.0 else None
