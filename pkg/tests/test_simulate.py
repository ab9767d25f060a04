"""Tests for the scenario simulators, presets and seed handling."""
import numpy as np
import pytest

from src.core import PointPattern, RasterSurface
from src.enums import ScenarioFamily
from src.errors import ConfigurationError, DataError, DominatingBoundError, ParameterError
from src.schemas import ScenarioSpec
from src.simulators import (
    LGCPSimulator,
    PoissonLinearSimulator,
    PoissonModulatedSimulator,
    SimulatorFactory,
    StraussSimulator,
    ThomasSimulator,
    calibrate_beta_rate,
    circulant_eigenvalues,
    close_pair_count,
    gaussian_field,
    get_preset,
    list_presets,
    run_scenario,
    sim_lgcp,
    sim_poisson_homog,
    sim_poisson_inhom,
    sim_strauss,
    sim_thomas,
    strauss_chain,
    thin,
)
from src.utils.calculations import derive_seed


class TestSeeds:

    def test_derive_seed_is_deterministic(self):
        assert derive_seed(7, 3) == derive_seed(7, 3)
        assert len({derive_seed(7, i) for i in range(100)}) == 100
        assert derive_seed(7, 0) != derive_seed(8, 0)

    def test_same_seed_same_pattern(self, unit_window):
        a = sim_poisson_homog(100.0, unit_window, 11)
        b = sim_poisson_homog(100.0, unit_window, 11)
        assert a.same_as(b)
        assert not a.same_as(sim_poisson_homog(100.0, unit_window, 12))

    def test_run_scenario_uses_spec_seed(self):
        spec = get_preset('thomas_1', seed=5)
        assert run_scenario(spec).same_as(run_scenario(spec))
        assert not run_scenario(spec).same_as(run_scenario(spec.with_seed(6)))


class TestPoisson:

    def test_homogeneous_mean_count(self, unit_window):
        counts = [sim_poisson_homog(100.0, unit_window, s).n for s in range(200)]
        assert np.mean(counts) == pytest.approx(100.0, abs=3 * np.sqrt(100.0 / 200))

    def test_rejects_non_positive_rate(self, unit_window):
        with pytest.raises(ParameterError):
            sim_poisson_homog(0.0, unit_window, 1)

    def test_thinning_retains_by_intensity(self, unit_window):
        p = sim_poisson_inhom(lambda x, y: 200.0 * (x < 0.5), 200.0, unit_window, 3)
        assert p.n > 0
        assert np.all(p.x < 0.5)

    def test_thinning_bound_violation(self, uniform_pattern):
        with pytest.raises(DominatingBoundError):
            thin(uniform_pattern, lambda x, y: np.full_like(x, 50.0), 10.0, 1)

    def test_thinning_negative_intensity(self, uniform_pattern):
        with pytest.raises(DataError):
            thin(uniform_pattern, lambda x, y: x - 0.5, 10.0, 1)

    def test_thinning_empty_pattern(self, unit_window):
        empty = PointPattern.empty(unit_window)
        assert thin(empty, lambda x, y: x, 1.0, 0).n == 0

    def test_linear_expected_count_and_truth(self, unit_window):
        sim = PoissonLinearSimulator(unit_window, alpha=240.0)
        assert sim.expected_count() == pytest.approx(130.0)
        assert sim.true_intensity(64, 64).integral() == pytest.approx(130.0)

    def test_linear_rejects_negative_intensity(self, unit_window):
        with pytest.raises(ParameterError):
            PoissonLinearSimulator(unit_window, alpha=-20.0)

    def test_modulated_expected_count(self, unit_window):
        sim = PoissonModulatedSimulator(unit_window, alpha=250.0)
        assert sim.expected_count() == pytest.approx(250.0 + 100.0 * np.sin(10.0) / 10.0)

    def test_modulated_requires_nonnegative_intensity(self, unit_window):
        with pytest.raises(ParameterError):
            PoissonModulatedSimulator(unit_window, alpha=50.0)

    @pytest.mark.slow
    def test_constant_intensity_matches_homogeneous(self, unit_window):
        thinned = [sim_poisson_inhom(lambda x, y: np.full_like(x, 125.0), 250.0, unit_window, derive_seed(1, s)).n
                   for s in range(1000)]
        direct = [sim_poisson_homog(125.0, unit_window, derive_seed(2, s)).n for s in range(1000)]
        se = np.sqrt(np.var(thinned, ddof=1) / 1000 + np.var(direct, ddof=1) / 1000)
        assert abs(np.mean(thinned) - np.mean(direct)) < 3 * se

    @pytest.mark.slow
    def test_linear_trend_mean_count(self, unit_window):
        sim = PoissonLinearSimulator(unit_window, alpha=480.0)
        assert sim.expected_count() == pytest.approx(250.0)
        counts = [sim.simulate(s).n for s in range(1000)]
        assert np.mean(counts) == pytest.approx(250.0, abs=3 * np.sqrt(250.0 / 1000))

    @pytest.mark.slow
    def test_superposition_of_two_draws(self, unit_window):
        unions = []
        for s in range(1000):
            a = sim_poisson_homog(60.0, unit_window, derive_seed(s, 0))
            b = sim_poisson_homog(60.0, unit_window, derive_seed(s, 1))
            unions.append(PointPattern(np.vstack([a.points, b.points]), unit_window).n)
        single = [sim_poisson_homog(120.0, unit_window, derive_seed(s, 2)).n for s in range(1000)]
        se = np.sqrt(np.var(unions, ddof=1) / 1000 + np.var(single, ddof=1) / 1000)
        assert abs(np.mean(unions) - np.mean(single)) < 3 * se


class TestLGCP:

    def test_eigenvalues_non_negative(self, unit_window):
        eigenvalues = circulant_eigenvalues(unit_window, 16, 16, 1.0, 5.0, approximate=True)
        assert eigenvalues.shape == (32, 32)
        assert np.all(eigenvalues >= 0)

    def test_field_variance(self, unit_window):
        eigenvalues = circulant_eigenvalues(unit_window, 32, 32, 2.0, 20.0, approximate=True)
        rng = np.random.default_rng(4)
        draws = np.array([gaussian_field(unit_window, 32, 32, 2.0, 20.0, rng, eigenvalues=eigenvalues)
                          for _ in range(500)])
        assert draws.shape == (500, 32, 32)
        assert np.mean(np.square(draws)) == pytest.approx(2.0, rel=0.05)

    def test_grid_must_be_power_of_two(self, unit_window):
        mu = RasterSurface.constant(unit_window, 12, 16, 4.0)
        with pytest.raises(ParameterError):
            sim_lgcp(mu, 0.5, 5.0, 1)

    def test_points_inside_window(self, unit_window):
        mu = RasterSurface.constant(unit_window, 32, 32, np.log(200.0))
        p = sim_lgcp(mu, 1.0, 5.0, 8, approximate=True)
        assert np.all(unit_window.contains(p.points))

    @pytest.mark.parametrize("trend", [0.0, 1.0])
    def test_true_intensity_integrates_to_target(self, unit_window, trend):
        sim = LGCPSimulator(unit_window, target_count=125.0, trend=trend, grid=64)
        assert sim.true_intensity(64, 64).integral() == pytest.approx(125.0, rel=1e-9)
        assert sim.default_trend_covariates() == (('x2', 'y2') if trend else ())

    @pytest.mark.slow
    def test_mean_count_near_target(self, unit_window):
        sim = LGCPSimulator(unit_window, target_count=125.0, sigma2=0.15, grid=64, approximate_embedding=1.0)
        counts = [sim.simulate(s).n for s in range(500)]
        se = np.std(counts, ddof=1) / np.sqrt(500)
        assert abs(np.mean(counts) - 125.0) < 3 * se

    @pytest.mark.slow
    def test_vanishing_variance_matches_poisson(self, unit_window):
        mu = RasterSurface.constant(unit_window, 32, 32, np.log(125.0))
        eigenvalues = circulant_eigenvalues(unit_window, 32, 32, 1e-10, 5.0, approximate=True)
        lgcp = [sim_lgcp(mu, 1e-10, 5.0, derive_seed(3, s), eigenvalues=eigenvalues).n for s in range(500)]
        poisson = [sim_poisson_inhom(lambda x, y: np.full_like(x, 125.0), 125.0, unit_window, derive_seed(4, s)).n
                   for s in range(500)]
        se = np.sqrt(np.var(lgcp, ddof=1) / 500 + np.var(poisson, ddof=1) / 500)
        assert abs(np.mean(lgcp) - np.mean(poisson)) < 3 * se

    def test_rejects_bad_grid(self, unit_window):
        with pytest.raises(ParameterError):
            LGCPSimulator(unit_window, target_count=100.0, grid=100)


class TestThomas:

    def test_offspring_inside_window(self, unit_window):
        p = ThomasSimulator(unit_window, kappa=25.0).simulate(2)
        assert np.all(unit_window.contains(p.points))

    def test_zero_offspring_mean_gives_empty_pattern(self, unit_window):
        assert ThomasSimulator(unit_window, kappa=20.0, mu=0.0).simulate(1).n == 0

    def test_gradient_favours_right_half(self, unit_window):
        sim = ThomasSimulator(unit_window, kappa=50.0, sigma=0.02)
        xs = np.concatenate([sim.simulate(s).x for s in range(20)])
        assert np.mean(xs > 0.5) > 0.6

    def test_invalid_parameters(self, unit_window):
        with pytest.raises(ParameterError):
            ThomasSimulator(unit_window, kappa=20.0, sigma=0.0)
        with pytest.raises(ConfigurationError):
            ThomasSimulator(unit_window)

    @pytest.mark.slow
    def test_stationary_mean_count(self, unit_window):
        counts = [sim_thomas(20.0, 0.2, 5.0, unit_window, s).n for s in range(1000)]
        se = np.std(counts, ddof=1) / np.sqrt(1000)
        assert abs(np.mean(counts) - 100.0) < 3 * se

    def test_intensity_not_tractable(self, unit_window):
        sim = ThomasSimulator(unit_window, kappa=20.0)
        assert sim.true_intensity(8, 8) is None
        assert not ScenarioFamily.THOMAS.has_tractable_intensity


class TestStrauss:

    def test_hard_core_has_no_close_pairs(self, unit_window):
        p = sim_strauss(200.0, 0.0, 0.05, 20_000, unit_window, 1)
        assert p.n > 20
        assert close_pair_count(p, 0.05) == 0

    @pytest.mark.slow
    def test_hard_core_on_every_replicate(self, unit_window):
        patterns = [sim_strauss(200.0, 0.0, 0.05, 5_000, unit_window, derive_seed(5, s)) for s in range(200)]
        assert all(close_pair_count(p, 0.05) == 0 for p in patterns)
        assert min(p.n for p in patterns) > 20

    @pytest.mark.slow
    def test_close_pairs_increase_with_gamma(self, unit_window):
        def mean_close_pairs(gamma):
            chains = [sim_strauss(150.0, gamma, 0.05, 5_000, unit_window, derive_seed(6, s)) for s in range(200)]
            return np.mean([close_pair_count(p, 0.05) for p in chains])
        assert mean_close_pairs(0.3) < mean_close_pairs(0.7)

    @pytest.mark.slow
    def test_close_pair_trace_is_stationary(self, unit_window):
        result = strauss_chain(150.0, 0.5, 0.05, 200_000, unit_window, 12, trace_every=1_000)
        kept = np.asarray(result.close_pair_trace[len(result.close_pair_trace) // 2:], dtype=float)
        first, second = np.array_split(kept, 2)
        pooled_se = np.sqrt(first.var(ddof=1) / first.size + second.var(ddof=1) / second.size)
        assert abs(first.mean() - second.mean()) < 3 * pooled_se

    @pytest.mark.slow
    def test_calibrated_activity_hits_target_count(self, unit_window):
        sim = StraussSimulator(unit_window, gamma=0.3, target_count=120.0, R=0.05, iterations=10_000)
        counts = [sim.simulate(derive_seed(7, s)).n for s in range(100)]
        assert np.mean(counts) == pytest.approx(120.0, rel=0.1)

    def test_no_interaction_is_poisson(self, unit_window):
        counts = [sim_strauss(100.0, 1.0, 0.05, 20_000, unit_window, s).n for s in range(10)]
        assert np.mean(counts) == pytest.approx(100.0, rel=0.15)

    def test_inhibition_lowers_close_pairs(self, unit_window):
        free = sim_strauss(150.0, 1.0, 0.05, 20_000, unit_window, 3)
        inhibited = sim_strauss(150.0, 0.2, 0.05, 20_000, unit_window, 3)
        assert close_pair_count(inhibited, 0.05) < close_pair_count(free, 0.05)

    def test_trace_matches_final_state(self, unit_window):
        result = strauss_chain(100.0, 0.5, 0.05, 5_000, unit_window, 9, trace_every=1_000)
        assert len(result.close_pair_trace) == 5
        assert result.close_pair_trace[-1] == close_pair_count(result.pattern, 0.05)

    def test_calibration_without_interaction(self, unit_window):
        assert calibrate_beta_rate(150.0, 1.0, 0.05, unit_window, 1_000, 2, 0) == 150.0

    def test_parameter_checks(self, unit_window):
        with pytest.raises(ConfigurationError):
            StraussSimulator(unit_window, gamma=0.5)
        with pytest.raises(ParameterError):
            StraussSimulator(unit_window, gamma=1.5, beta_rate=100.0)
        with pytest.raises(ParameterError):
            sim_strauss(100.0, 0.5, 0.05, 0, unit_window, 1)

    def test_expected_count(self, unit_window):
        assert StraussSimulator(unit_window, gamma=0.5, target_count=120.0).expected_count() == 120.0
        assert StraussSimulator(unit_window, gamma=0.5, beta_rate=100.0).expected_count() is None
        assert StraussSimulator(unit_window, gamma=1.0, beta_rate=100.0).expected_count() == 100.0


class TestFactoryAndPresets:

    @pytest.mark.parametrize("name", list_presets())
    def test_every_preset_builds(self, name):
        simulator = SimulatorFactory.create_simulator(get_preset(name))
        assert simulator.get_family() == get_preset(name).family

    def test_preset_catalogue(self):
        names = list_presets()
        for family in ('poisson_homog', 'poisson_linear', 'poisson_modulated', 'lgcp_homog', 'lgcp_inhom'):
            assert all(f"{family}_{size}" in names for size in (125, 250, 500))
        assert {'thomas_1', 'thomas_2', 'thomas_3', 'strauss_1', 'strauss_2', 'strauss_3'} <= set(names)

    def test_unknown_preset(self):
        with pytest.raises(ConfigurationError):
            get_preset('poisson_homog_7')

    def test_unknown_parameter(self):
        spec = ScenarioSpec(family='poisson_homog', parameters={'rho': 10.0, 'gamma': 0.5})
        with pytest.raises(ConfigurationError):
            SimulatorFactory.create_simulator(spec)

    def test_missing_parameter(self):
        with pytest.raises(ConfigurationError):
            SimulatorFactory.create_simulator(ScenarioSpec(family='lgcp'))

    def test_supported_families(self):
        assert set(SimulatorFactory.get_supported_families()) == {f.value for f in ScenarioFamily}
