"""Shared fixtures for the test suite."""
import numpy as np
import pytest

from src.core import ObservationWindow, PointPattern


@pytest.fixture
def unit_window():
    return ObservationWindow.unit_square()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def uniform_pattern(unit_window, rng):
    """100 uniform points on the unit square."""
    return PointPattern(rng.uniform(size=(100, 2)), unit_window)


@pytest.fixture
def clustered_pattern(unit_window, rng):
    """Five tight clusters of 20 points each."""
    centres = rng.uniform(0.2, 0.8, size=(5, 2))
    points = np.repeat(centres, 20, axis=0) + rng.normal(scale=0.015, size=(100, 2))
    return PointPattern(np.clip(points, 0.0, 1.0), unit_window)


@pytest.fixture
def two_point_pattern(unit_window):
    return PointPattern(np.array([[0.2, 0.5], [0.3, 0.5]]), unit_window)
