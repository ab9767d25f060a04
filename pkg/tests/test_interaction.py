"""Tests for discrepancy functionals, phi* marks and their interpolation."""
import numpy as np
import pytest

from src.core import MarkedPattern, PointPattern
from src.enums import DiscrepancyKind, InterpolationMethod
from src.errors import InsufficientPointsError, NoDataError, ParameterError, SingularIntegrandError
from src.interaction import (
    DiscrepancySpec,
    InterpolationSpec,
    discrepancy,
    discrepancy_values,
    idw_at,
    interpolate,
    kernel_smoother_at,
    lscv_bandwidth,
    lscv_score,
    phi_star_at_points,
)
from src.localstats import LocalKFunction, RadiusGrid, k_pois
from src.simulators import ThomasSimulator, sim_poisson_homog


@pytest.fixture
def grid(unit_window):
    return RadiusGrid.default_for(unit_window)


class TestDiscrepancy:

    @pytest.mark.parametrize("kind, expected", [
        (DiscrepancyKind.EXP_NORMALIZED, 1.0),
        (DiscrepancyKind.EXP_SQUARED, 1.0),
        (DiscrepancyKind.UNIFORM_METRIC, 0.0),
        (DiscrepancyKind.L2_METRIC, 0.0),
    ])
    def test_poisson_curve_is_null(self, grid, kind, expected):
        local = LocalKFunction(0, grid, k_pois(grid.r_values))
        assert discrepancy(local, DiscrepancySpec(kind)) == expected

    def test_double_poisson_curve_closed_form(self, grid):
        local = LocalKFunction(0, grid, 2.0 * k_pois(grid.r_values))
        expected = np.exp(np.pi * (grid.r_max ** 3 - grid.r0 ** 3) / 3.0)
        assert discrepancy(local, DiscrepancySpec()) == pytest.approx(expected, rel=1e-3)

    def test_trapezoid_accuracy_on_scaled_integrand(self, grid):
        c = 3.0
        local = LocalKFunction(0, grid, (1.0 + c) * k_pois(grid.r_values))
        exponent = np.log(discrepancy(local, DiscrepancySpec()))
        closed_form = c ** 2 * np.pi * (grid.r_max ** 3 - grid.r0 ** 3) / 3.0
        assert exponent == pytest.approx(closed_form, rel=1e-3)

    def test_uniform_and_l2_metrics(self):
        g = RadiusGrid(np.array([0.1, 0.2, 0.3]))
        k = k_pois(g.r_values) + np.array([0.0, 0.2, -0.4])
        assert discrepancy(LocalKFunction(0, g, k), DiscrepancySpec('uniform')) == pytest.approx(0.4)
        # trapezoid of [0, 0.04, 0.16] with spacing 0.1 is 0.012
        assert discrepancy(LocalKFunction(0, g, k), DiscrepancySpec('l2')) == pytest.approx(np.sqrt(0.012))

    def test_zero_origin_grid_is_singular(self):
        g = RadiusGrid(np.array([0.0, 0.1, 0.2]))
        with pytest.raises(SingularIntegrandError):
            discrepancy(LocalKFunction(0, g, [0.0, 0.1, 0.2]), DiscrepancySpec())
        assert discrepancy(LocalKFunction(0, g, [0.0, 0.1, 0.2]), DiscrepancySpec('l2')) >= 0.0

    def test_signed_variant_goes_below_one(self, grid):
        local = LocalKFunction(0, grid, 0.5 * k_pois(grid.r_values))
        assert discrepancy(local, DiscrepancySpec(signed=True)) < 1.0
        assert discrepancy(local, DiscrepancySpec()) > 1.0

    def test_huge_exponent_is_clipped(self, grid, caplog):
        local = LocalKFunction(0, grid, np.full(len(grid), 1e4))
        with caplog.at_level('WARNING'):
            value = discrepancy(local, DiscrepancySpec())
        assert np.isfinite(value)
        assert "clipping" in caplog.text

    def test_rejects_non_positive_exponent(self):
        with pytest.raises(ParameterError):
            DiscrepancySpec(exponent=0.0)

    def test_vectorised_over_points(self, grid, rng):
        k = k_pois(grid.r_values) * rng.uniform(0.5, 1.5, size=(4, 1))
        values = discrepancy_values(k, grid, DiscrepancySpec())
        assert values.shape == (4,)
        for i in range(4):
            assert values[i] == pytest.approx(discrepancy(LocalKFunction(i, grid, k[i]), DiscrepancySpec()))


class TestPhiStar:

    def test_two_point_marks_are_equal(self, two_point_pattern, grid):
        marks = phi_star_at_points(two_point_pattern, grid).marks
        assert marks[0] == marks[1]

    def test_default_marks_at_least_one(self, uniform_pattern, grid):
        assert np.all(phi_star_at_points(uniform_pattern, grid).marks >= 1.0)

    def test_dense_cluster_above_median(self, unit_window, rng):
        background = rng.uniform(size=(70, 2))
        cluster = np.clip(np.array([0.3, 0.6]) + rng.normal(scale=0.02, size=(30, 2)), 0, 1)
        p = PointPattern(np.vstack([background, cluster]), unit_window)
        marks = phi_star_at_points(p, RadiusGrid.default_for(unit_window)).marks
        assert np.all(marks[70:] > np.median(marks))

    def test_insufficient_points(self, unit_window, grid):
        with pytest.raises(InsufficientPointsError):
            phi_star_at_points(PointPattern(np.array([[0.5, 0.5]]), unit_window), grid)

    def test_relabelling_permutes_marks(self, uniform_pattern, grid):
        order = np.arange(uniform_pattern.n)[::-1]
        permuted = PointPattern(uniform_pattern.points[order], uniform_pattern.window)
        original = phi_star_at_points(uniform_pattern, grid).marks
        assert np.allclose(phi_star_at_points(permuted, grid).marks, original[order], rtol=1e-12)

    def test_poisson_median_near_one(self, unit_window, grid):
        medians = [np.median(phi_star_at_points(sim_poisson_homog(250.0, unit_window, s), grid).marks)
                   for s in range(10)]
        assert all(1.0 <= m <= 1.5 for m in medians)

    @pytest.mark.slow
    def test_thomas_median_exceeds_matched_poisson(self, unit_window, grid):
        thomas = ThomasSimulator(unit_window, kappa=20)
        patterns = [thomas.simulate(seed) for seed in range(100)]
        expected = float(np.mean([p.n for p in patterns]))
        wins = 0
        for seed, clustered in enumerate(patterns):
            poisson = sim_poisson_homog(expected, unit_window, 10_000 + seed)
            wins += np.median(phi_star_at_points(clustered, grid).marks) > \
                np.median(phi_star_at_points(poisson, grid).marks)
        assert wins >= 95


class TestInterpolation:

    @pytest.fixture
    def marked(self, uniform_pattern, rng):
        return MarkedPattern(uniform_pattern, rng.uniform(1.0, 3.0, size=uniform_pattern.n))

    def test_constant_marks_give_constant_surface(self, uniform_pattern):
        mp = MarkedPattern(uniform_pattern, np.full(uniform_pattern.n, 2.5))
        for spec in (InterpolationSpec('idw'), InterpolationSpec('kernel', kernel_bandwidth=0.05)):
            assert np.allclose(interpolate(mp, spec, 16, 16).values, 2.5)

    def test_idw_midpoint(self, two_point_pattern):
        mp = MarkedPattern(two_point_pattern, [1.0, 3.0])
        assert idw_at(mp, np.array([[0.25, 0.5]]))[0] == pytest.approx(2.0)

    def test_idw_at_data_point_is_exact(self, marked):
        assert np.array_equal(idw_at(marked, marked.points[:5]), marked.marks[:5])

    def test_surfaces_stay_within_mark_range(self, marked):
        for spec in (InterpolationSpec('idw'), InterpolationSpec('kernel', kernel_bandwidth=0.08)):
            values = interpolate(marked, spec, 32, 32).values
            assert values.min() >= marked.marks.min() - 1e-12
            assert values.max() <= marked.marks.max() + 1e-12

    def test_indicator_surface_is_one(self, marked):
        s = interpolate(marked, InterpolationSpec(InterpolationMethod.INDICATOR), 8, 8)
        assert np.array_equal(s.values, np.ones((8, 8)))

    def test_empty_pattern(self, unit_window):
        mp = MarkedPattern(PointPattern.empty(unit_window), [])
        with pytest.raises(NoDataError):
            interpolate(mp, InterpolationSpec(), 4, 4)

    def test_kernel_underflow_falls_back_to_nearest_mark(self, two_point_pattern):
        mp = MarkedPattern(two_point_pattern, [1.0, 3.0])
        values = kernel_smoother_at(mp, np.array([[0.0, 0.0], [1.0, 1.0]]), bandwidth=1e-4)
        assert values.tolist() == [1.0, 3.0]

    def test_invalid_spec(self):
        with pytest.raises(ParameterError):
            InterpolationSpec(idw_power=-1.0)
        with pytest.raises(ParameterError):
            InterpolationSpec('kernel', kernel_bandwidth=0.0)


class TestLSCV:

    def test_needs_three_points(self, two_point_pattern):
        with pytest.raises(InsufficientPointsError):
            lscv_bandwidth(MarkedPattern(two_point_pattern, [1.0, 2.0]))

    def test_constant_marks_return_midpoint(self, uniform_pattern):
        from scipy.spatial.distance import pdist
        mp = MarkedPattern(uniform_pattern, np.ones(uniform_pattern.n))
        lower = pdist(uniform_pattern.points).min()
        upper = uniform_pattern.window.diagonal / 2
        assert lscv_bandwidth(mp) == pytest.approx(0.5 * (lower + upper))

    def test_selected_bandwidth_beats_endpoints(self, unit_window):
        from scipy.spatial.distance import pdist
        rng = np.random.default_rng(3)
        points = rng.uniform(size=(50, 2))
        marks = np.sin(2 * np.pi * points[:, 0]) + rng.normal(scale=0.1, size=50)
        mp = MarkedPattern(PointPattern(points, unit_window), marks)
        h = lscv_bandwidth(mp)
        lower, upper = pdist(points).min(), unit_window.diagonal / 2
        assert lower <= h <= upper
        assert lscv_score(mp, h) <= lscv_score(mp, lower)
        assert lscv_score(mp, h) <= lscv_score(mp, upper)

    def test_duplicated_data_prefers_smaller_bandwidth(self, unit_window):
        rng = np.random.default_rng(5)
        points = rng.uniform(size=(40, 2))
        marks = np.sin(2 * np.pi * points[:, 0]) + rng.normal(scale=0.1, size=40)
        original = MarkedPattern(PointPattern(points, unit_window), marks)
        doubled = MarkedPattern(PointPattern(np.vstack([points, points]), unit_window), np.tile(marks, 2))
        assert lscv_bandwidth(doubled) <= lscv_bandwidth(original)
