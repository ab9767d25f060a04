"""Tests for the paired replication study."""
from dataclasses import replace

import numpy as np
import pytest

from src.enums import MetricKind, StudyMethod
from src.errors import ConfigurationError
from src.fit import fit_poisson, make_quadrature, offset_model
from src.interaction import phi_star_at_points
from src.localstats import RadiusGrid
from src.simulators import SimulatorFactory, get_preset, run_scenario
from src.study_service import (
    ReplicateRecord,
    StudyOptions,
    StudyService,
    gather_in_pool,
    run_replicate,
    run_study,
    summarise,
)
from src.utils.calculations import derive_seed

FAST = StudyOptions(radius_count=30, dummy_per_side=16, nx=32, ny=32)


def _square(value):
    return value * value


class TestRunStudy:

    def test_single_replicate_mean_is_the_score(self):
        spec = get_preset('poisson_homog_125', seed=3)
        report = run_study(spec, 1, [StudyMethod.NONE], MetricKind.MISE, options=FAST)
        record = run_replicate(spec, 0, [StudyMethod.NONE], MetricKind.MISE, FAST)
        summary = report.summary(StudyMethod.NONE)
        assert summary.mean == record.scores['none']
        assert summary.standard_error == 0.0
        assert summary.replicates_used == 1

    def test_rerun_is_identical(self):
        spec = get_preset('poisson_linear_125', seed=11)
        first = run_study(spec, 3, metric=MetricKind.MISE, options=FAST)
        second = run_study(spec, 3, metric=MetricKind.MISE, options=FAST)
        assert [m.model_dump() for m in first.methods] == [m.model_dump() for m in second.methods]

    def test_replicates_are_paired(self):
        spec = get_preset('poisson_homog_125', seed=4)
        report = run_study(spec, 2, metric=MetricKind.CHI2, chi2_partition=(3, 3), options=FAST)
        simulator = SimulatorFactory.create_simulator(spec)
        for record in report.records:
            assert record.seed == derive_seed(spec.seed, record.index)
            assert record.n_points == simulator.simulate(record.seed).n
            assert set(record.scores) == {m.value for m in StudyMethod}
        assert report.quadrats == (3, 3)

    def test_indicator_ties_with_unpenalised(self):
        spec = get_preset('lgcp_homog_125', seed=2)
        report = run_study(spec, 2, [StudyMethod.NONE, StudyMethod.INDICATOR], MetricKind.MISE, options=FAST)
        baseline = report.summary(StudyMethod.NONE).mean
        assert report.summary(StudyMethod.INDICATOR).paired_difference == pytest.approx(0.0, abs=1e-6 * baseline)

    def test_mise_rejected_without_known_intensity(self):
        with pytest.raises(ConfigurationError):
            run_study(get_preset('thomas_1'), 1, metric=MetricKind.MISE, options=FAST)

    def test_rejects_bad_arguments(self):
        spec = get_preset('poisson_homog_125')
        with pytest.raises(ConfigurationError):
            StudyService(FAST).run_study(spec, 0)
        with pytest.raises(ConfigurationError):
            StudyService(FAST).run_study(spec, 1, methods=[])

    @pytest.mark.slow
    def test_worker_processes_give_the_same_report(self):
        spec = get_preset('poisson_homog_125', seed=8)
        sequential = run_study(spec, 4, metric=MetricKind.CHI2, options=FAST)
        pooled = StudyService(replace(FAST, threads=2)).run_study(
            spec, 4, metric=MetricKind.CHI2
        )
        assert [m.model_dump() for m in sequential.methods] == [m.model_dump() for m in pooled.methods]

    @pytest.mark.slow
    def test_poisson_methods_tie(self):
        spec = get_preset('poisson_homog_125', seed=1)
        report = run_study(spec, 50, [StudyMethod.NONE, StudyMethod.INDICATOR], MetricKind.MISE, options=FAST)
        none, indicator = report.summary(StudyMethod.NONE), report.summary(StudyMethod.INDICATOR)
        pooled = np.hypot(none.standard_error, indicator.standard_error)
        assert abs(indicator.mean - none.mean) < 2 * pooled

    @pytest.mark.slow
    @pytest.mark.parametrize("preset", ['thomas_1', 'thomas_2', 'thomas_3'])
    def test_thomas_indicator_not_worse(self, preset):
        report = run_study(get_preset(preset, seed=1), 50, [StudyMethod.NONE, StudyMethod.INDICATOR],
                           MetricKind.CHI2, options=FAST)
        none = report.summary(StudyMethod.NONE).mean
        assert report.summary(StudyMethod.INDICATOR).mean <= none * (1 + 1e-6)

    @pytest.mark.slow
    @pytest.mark.parametrize("preset", ['strauss_1', 'strauss_2', 'strauss_3'])
    def test_strauss_methods_tie(self, preset):
        spec = get_preset(preset, seed=2)
        spec = spec.model_copy(update={'parameters': {**spec.parameters, 'iterations': 20_000.0}})
        report = run_study(spec, 10, [StudyMethod.NONE, StudyMethod.INDICATOR], MetricKind.CHI2, options=FAST)
        none, indicator = report.summary(StudyMethod.NONE), report.summary(StudyMethod.INDICATOR)
        pooled = np.hypot(none.standard_error, indicator.standard_error)
        assert abs(indicator.mean - none.mean) <= pooled


class TestAICComparison:

    @pytest.fixture(scope='class')
    def thomas_fits(self):
        pattern = run_scenario(get_preset('thomas_1', seed=3))
        marks = phi_star_at_points(pattern, RadiusGrid.default_for(pattern.window))
        quadrature = make_quadrature(pattern, 32)
        fits = {}
        for method in StudyMethod:
            model = offset_model(method, None if method == StudyMethod.NONE else marks, ('x',), nx=64, ny=64)
            fits[method] = fit_poisson(pattern, model=model, q=quadrature)
        return marks, fits

    def test_all_fits_converge(self, thomas_fits):
        _, fits = thomas_fits
        assert all(f.converged for f in fits.values())

    def test_indicator_aic_is_shifted_unpenalised_aic(self, thomas_fits):
        marks, fits = thomas_fits
        expected = fits[StudyMethod.NONE].aic - 2 * np.log(marks.marks).sum()
        assert fits[StudyMethod.INDICATOR].aic == pytest.approx(expected, rel=1e-8)

    def test_indicator_has_lowest_aic(self, thomas_fits):
        _, fits = thomas_fits
        indicator = fits[StudyMethod.INDICATOR].aic
        for method in (StudyMethod.NONE, StudyMethod.IDW, StudyMethod.KERNEL):
            assert indicator < fits[method].aic


class TestSummarise:

    def test_excluded_replicates_are_counted(self):
        records = [
            ReplicateRecord(0, 1, 10, {'none': 1.0, 'I': 2.0}),
            ReplicateRecord(1, 2, 10, {'none': 3.0, 'I': None}, {'I': 'fit did not converge'}),
        ]
        summaries = summarise(records, [StudyMethod.NONE, StudyMethod.INDICATOR])
        assert summaries[0].mean == 2.0
        assert summaries[0].excluded == 0
        assert summaries[1].mean == 2.0
        assert summaries[1].excluded == 1
        assert summaries[1].paired_difference == 1.0

    def test_all_excluded(self):
        records = [ReplicateRecord(0, 1, 1, {'none': None})]
        summary = summarise(records, [StudyMethod.NONE])[0]
        assert summary.mean is None
        assert summary.replicates_used == 0


class TestGatherInPool:

    def test_sequential_keeps_order(self):
        import asyncio
        assert asyncio.run(gather_in_pool(_square, [(i,) for i in range(5)], 1)) == [0, 1, 4, 9, 16]

    def test_pool_keeps_order(self):
        import asyncio
        assert asyncio.run(gather_in_pool(_square, [(i,) for i in range(6)], 2)) == [0, 1, 4, 9, 16, 25]
