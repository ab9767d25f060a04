"""Tests for local and global K-functions."""
import numpy as np
import pytest

from src.core import ObservationWindow, PointPattern
from src.errors import GridMismatchError, InsufficientPointsError, NoDataError, ParameterError, UndefinedWeightError
from src.localstats import (
    LocalKFunction,
    RadiusGrid,
    global_k,
    k_pois,
    local_k,
    local_k_all,
    local_k_matrix,
    translation_weight,
)
from src.simulators import sim_poisson_homog


def brute_force_local_k(p: PointPattern, i: int, grid: RadiusGrid) -> np.ndarray:
    """Double-loop reference: (|W|/n) sum_{j != i} w(x_i, x_j) 1{d <= r}."""
    w = p.window
    values = np.zeros(len(grid))
    for k, r in enumerate(grid.r_values):
        total = 0.0
        for j in range(p.n):
            if j == i:
                continue
            d = np.hypot(p.points[j, 0] - p.points[i, 0], p.points[j, 1] - p.points[i, 1])
            if d <= r:
                total += translation_weight(w, p.points[i], p.points[j])
        values[k] = w.area / p.n * total
    return values


class TestRadiusGrid:

    def test_default_grid(self, unit_window):
        g = RadiusGrid.default_for(unit_window)
        assert len(g) == 100
        assert g.r_max == pytest.approx(0.25)
        assert g.r0 == pytest.approx(0.0025)

    def test_rejects_decreasing_radii(self):
        with pytest.raises(ParameterError):
            RadiusGrid(np.array([0.1, 0.05]))

    def test_rejects_single_radius(self):
        with pytest.raises(ParameterError):
            RadiusGrid(np.array([0.1]))


class TestBenchmarkAndWeights:

    @pytest.mark.parametrize("r, expected", [(0.1, 0.031415926535), (1.0, np.pi), (0.25, 0.19634954084)])
    def test_k_pois(self, r, expected):
        assert k_pois(r) == pytest.approx(expected, rel=1e-10)

    @pytest.mark.parametrize("xj, expected", [((0.3, 0.3), 1.0), ((0.4, 0.3), 1 / 0.9), ((0.8, 0.8), 4.0)])
    def test_translation_weight(self, unit_window, xj, expected):
        assert translation_weight(unit_window, (0.3, 0.3), xj) == pytest.approx(expected)

    def test_translation_weight_is_symmetric(self, unit_window):
        a, b = (0.1, 0.7), (0.45, 0.2)
        assert translation_weight(unit_window, a, b) == translation_weight(unit_window, b, a)

    def test_translation_weight_undefined_beyond_side(self):
        w = ObservationWindow(0.0, 1.0, 0.0, 0.5)
        with pytest.raises(UndefinedWeightError):
            translation_weight(w, (0.0, 0.0), (0.2, 0.5))


class TestLocalK:

    def test_two_point_example(self, two_point_pattern):
        g = RadiusGrid.linear(0.01, 0.25, 25)
        k = local_k(two_point_pattern, 0, g).k_values
        beyond = g.r_values > 0.1 + 1e-9
        below = g.r_values < 0.1 - 1e-9
        assert np.allclose(k[beyond], 0.5 / 0.9)
        assert np.all(k[below] == 0.0)

    def test_symmetric_pair_gives_identical_locals(self, two_point_pattern):
        g = RadiusGrid.linear(0.01, 0.25, 25)
        first, second = local_k_all(two_point_pattern, g)
        assert np.array_equal(first.k_values, second.k_values)

    def test_zero_below_nearest_neighbour(self, uniform_pattern):
        g = RadiusGrid.linear(1e-6, 2e-6, 2)
        assert np.all(local_k_matrix(uniform_pattern, g) == 0.0)

    def test_insufficient_points(self, unit_window):
        p = PointPattern(np.array([[0.5, 0.5]]), unit_window)
        with pytest.raises(InsufficientPointsError):
            local_k(p, 0, RadiusGrid.default_for(unit_window))

    def test_matches_brute_force_oracle(self, unit_window):
        rng = np.random.default_rng(7)
        g = RadiusGrid.default_for(unit_window, count=40)
        for _ in range(100):
            n = int(rng.integers(2, 31))
            p = PointPattern(rng.uniform(size=(n, 2)), unit_window)
            matrix = local_k_matrix(p, g)
            for i in range(n):
                reference = brute_force_local_k(p, i, g)
                assert np.allclose(matrix[i], reference, rtol=0, atol=1e-12)
                assert np.allclose(local_k(p, i, g).k_values, reference, rtol=0, atol=1e-12)

    def test_oracle_on_rectangular_window(self):
        rng = np.random.default_rng(11)
        w = ObservationWindow(0.0, 2.0, -1.0, 0.0)
        p = PointPattern(np.column_stack([rng.uniform(0, 2, 25), rng.uniform(-1, 0, 25)]), w)
        g = RadiusGrid.default_for(w, count=30)
        matrix = local_k_matrix(p, g)
        for i in range(p.n):
            assert np.allclose(matrix[i], brute_force_local_k(p, i, g), rtol=0, atol=1e-12)

    def test_locals_are_nondecreasing(self, clustered_pattern):
        matrix = local_k_matrix(clustered_pattern, RadiusGrid.default_for(clustered_pattern.window))
        assert np.all(np.diff(matrix, axis=1) >= 0)
        assert np.all(matrix >= 0)


class TestGlobalK:

    def test_mean_of_two_locals(self):
        g = RadiusGrid(np.array([0.1, 0.2]))
        result = global_k([LocalKFunction(0, g, [0.0, 0.2]), LocalKFunction(1, g, [0.1, 0.4])])
        assert np.allclose(result.k_values, [0.05, 0.3])

    def test_identical_locals(self):
        g = RadiusGrid(np.array([0.1, 0.2, 0.3]))
        local = LocalKFunction(0, g, [0.01, 0.1, 0.3])
        assert np.array_equal(global_k([local, local]).k_values, local.k_values)

    def test_empty_input(self):
        with pytest.raises(NoDataError):
            global_k([])

    def test_grid_mismatch(self):
        a = LocalKFunction(0, RadiusGrid(np.array([0.1, 0.2])), [0.0, 0.1])
        b = LocalKFunction(1, RadiusGrid(np.array([0.1, 0.3])), [0.0, 0.1])
        with pytest.raises(GridMismatchError):
            global_k([a, b])

    @pytest.mark.slow
    def test_poisson_benchmark(self, unit_window):
        g = RadiusGrid.linear(0.01, 0.125, 24)
        estimates = []
        for seed in range(400):
            p = sim_poisson_homog(250.0, unit_window, seed)
            estimates.append(global_k(local_k_all(p, g)).k_values)
        mean = np.mean(estimates, axis=0)
        assert np.all(np.abs(mean / k_pois(g.r_values) - 1.0) < 0.05)
