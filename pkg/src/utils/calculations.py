"""
Calculation utilities for the Penalised Intensity Estimation System.

Provides shared numerical helpers used across multiple modules.
"""
from typing import Sequence, Union

import numpy as np
from scipy import integrate


def trapezoid(values: Union[Sequence[float], np.ndarray], grid: Union[Sequence[float], np.ndarray]) -> float:
    """
    Integrate sampled values over a grid with the trapezoid rule.

    Args:
        values: Function values, one per grid abscissa (last axis)
        grid: Strictly increasing abscissae

    Returns:
        Trapezoid-rule integral

    Example:
        >>> trapezoid([0.0, 1.0, 2.0], [0.0, 1.0, 2.0])
        2.0
    """
    return integrate.trapezoid(np.asarray(values, dtype=float), np.asarray(grid, dtype=float), axis=-1)


def derive_seed(seed: int, index: int) -> int:
    """
    Derive an independent 64-bit seed for replicate `index` of a run seeded with `seed`.

    The derivation only depends on (seed, index), so results never depend on
    the order in which parallel workers finish.

    Args:
        seed: Base seed of the run
        index: Replicate index (0-based)

    Returns:
        Derived seed as a Python int
    """
    sequence = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, int(index)])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def mean_and_standard_error(values: Union[Sequence[float], np.ndarray]) -> tuple:
    """
    Sample mean and standard error of the mean.

    Args:
        values: Replicate values (at least one)

    Returns:
        (mean, standard error); the standard error is 0.0 for a single value

    Example:
        >>> mean_and_standard_error([1.0, 3.0])
        (2.0, 1.0)
    """
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("mean_and_standard_error needs at least one value")
    mean = float(arr.mean())
    if arr.size == 1:
        return mean, 0.0
    return mean, float(arr.std(ddof=1) / np.sqrt(arr.size))


def pooled_standard_error(se_a: float, se_b: float) -> float:
    """Standard error of a difference of two independent means."""
    return float(np.hypot(se_a, se_b))


def format_metric(value: float) -> str:
    """
    Format a study metric for text tables.

    Large values (typical MISE on count scale) get thousands separators,
    small ones keep four significant decimals.

    Example:
        >>> format_metric(1190807.2)
        '1,190,807'
        >>> format_metric(0.25)
        '0.2500'
    """
    if value is None or not np.isfinite(value):
        return "N/A"
    if abs(value) >= 1000:
        return f"{value:,.0f}"
    if abs(value) >= 1:
        return f"{value:.2f}"
    return f"{value:.4f}"
