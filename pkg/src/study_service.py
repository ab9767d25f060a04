"""
Replication study service.

Simulates paired replicates of a scenario, fits every compared method to
the same pattern and aggregates a goodness-of-fit metric per method.
Replicates fan out with asyncio.gather over a process pool.
"""
import asyncio
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from src.config import RunConfig
from src.core import ObservationWindow
from src.enums import MetricKind, StudyMethod
from src.errors import ConfigurationError, DataError, NumericalError
from src.fit import fit_poisson, make_quadrature, offset_model, predict_intensity
from src.interaction import DiscrepancySpec, InterpolationSpec, phi_star_at_points
from src.localstats import RadiusGrid
from src.schemas import MethodSummary, ScenarioSpec
from src.simulators import SimulatorFactory
from src.utils.calculations import derive_seed, mean_and_standard_error
from src.validators import GoodnessOfFitValidator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StudyOptions:
    """Estimation settings shared by every replicate."""
    discrepancy: DiscrepancySpec = field(default_factory=DiscrepancySpec)
    interpolation: InterpolationSpec = field(default_factory=InterpolationSpec)
    radius_count: int = 100
    r_max: Optional[float] = None
    r0: Optional[float] = None
    dummy_per_side: Optional[int] = None
    max_iterations: int = 100
    nx: int = 128
    ny: int = 128
    quadrats: Tuple[int, int] = (5, 5)
    threads: int = 1

    @classmethod
    def from_run_config(cls, rc: RunConfig) -> "StudyOptions":
        return cls(
            discrepancy=DiscrepancySpec(rc.interaction.discrepancy, rc.interaction.exponent, rc.interaction.signed),
            interpolation=InterpolationSpec(
                rc.interaction.interpolation, rc.interaction.idw_power, rc.interaction.kernel_bandwidth
            ),
            radius_count=rc.localstats.radius_count,
            r_max=rc.localstats.r_max,
            r0=rc.localstats.r0,
            dummy_per_side=rc.fit.dummy_per_side,
            max_iterations=rc.fit.max_iterations,
            nx=rc.raster.nx,
            ny=rc.raster.ny,
            quadrats=(rc.study.quadrat_rows, rc.study.quadrat_cols),
            threads=rc.runtime.threads,
        )

    def radius_grid(self, window: ObservationWindow) -> RadiusGrid:
        return RadiusGrid.default_for(window, self.radius_count, self.r_max, self.r0)


@dataclass
class ReplicateRecord:
    """Scores of every method on one replicate; None marks an excluded fit."""
    index: int
    seed: int
    n_points: int
    scores: Dict[str, Optional[float]]
    notes: Dict[str, str] = field(default_factory=dict)


@dataclass
class StudyReport:
    scenario: ScenarioSpec
    metric: MetricKind
    replicates: int
    methods: List[MethodSummary]
    records: List[ReplicateRecord]
    quadrats: Optional[Tuple[int, int]]
    raster: Tuple[int, int]

    def summary(self, method: StudyMethod) -> MethodSummary:
        for item in self.methods:
            if item.method == StudyMethod(method).value:
                return item
        raise KeyError(method)


# =============================================================================
# Replicate worker
# =============================================================================

def run_replicate(
    spec: ScenarioSpec,
    index: int,
    methods: Sequence[StudyMethod],
    metric: MetricKind,
    options: StudyOptions,
) -> ReplicateRecord:
    """
    Simulate replicate `index` and score every method on the same pattern.

    Runs in worker processes, so it only takes picklable arguments.
    """
    seed = derive_seed(spec.seed, index)
    simulator = SimulatorFactory.create_simulator(spec)
    pattern = simulator.simulate(seed)
    validator = GoodnessOfFitValidator(metric, options.quadrats)
    truth = simulator.true_intensity(options.nx, options.ny) if metric == MetricKind.MISE else None
    covariates = simulator.default_trend_covariates()
    scores: Dict[str, Optional[float]] = {m.value: None for m in methods}
    notes: Dict[str, str] = {}

    if pattern.n < 2:
        for m in methods:
            notes[m.value] = f"pattern has {pattern.n} point(s)"
        return ReplicateRecord(index, seed, pattern.n, scores, notes)

    marks = None
    if any(m != StudyMethod.NONE for m in methods):
        marks = phi_star_at_points(pattern, options.radius_grid(pattern.window), options.discrepancy)
    quadrature = make_quadrature(pattern, options.dummy_per_side)

    for method in methods:
        try:
            model = offset_model(method, marks, covariates, options.interpolation, options.nx, options.ny)
            result = fit_poisson(pattern, None, model, quadrature, max_iterations=options.max_iterations)
            if not result.converged:
                notes[method.value] = "fit did not converge"
                continue
            fitted = predict_intensity(result, nx=options.nx, ny=options.ny)
            scores[method.value] = validator.score(pattern, fitted, truth)
        except (DataError, NumericalError) as e:
            notes[method.value] = str(e)
    return ReplicateRecord(index, seed, pattern.n, scores, notes)


# =============================================================================
# Aggregation
# =============================================================================

def summarise(records: Sequence[ReplicateRecord], methods: Sequence[StudyMethod]) -> List[MethodSummary]:
    """Per-method mean and standard error, plus paired differences to the unpenalised fit."""
    summaries = []
    baseline = StudyMethod.NONE.value
    for method in methods:
        key = method.value
        values = [r.scores[key] for r in records if r.scores.get(key) is not None]
        excluded = len(records) - len(values)
        if excluded:
            logger.warning(f"Method {method.display_name}: {excluded} replicate(s) excluded")
        mean, se = mean_and_standard_error(values) if values else (None, None)

        diff_mean = diff_se = None
        if method != StudyMethod.NONE and baseline in records[0].scores:
            diffs = [
                r.scores[key] - r.scores[baseline] for r in records
                if r.scores.get(key) is not None and r.scores.get(baseline) is not None
            ]
            if diffs:
                diff_mean, diff_se = mean_and_standard_error(diffs)

        summaries.append(MethodSummary(
            method=key,
            mean=mean,
            standard_error=se,
            replicates_used=len(values),
            excluded=excluded,
            paired_difference=diff_mean,
            paired_difference_se=diff_se,
        ))
    return summaries


async def gather_in_pool(worker: Callable, jobs: Sequence[tuple], threads: int) -> list:
    """
    Run `worker(*job)` for every job, in a process pool when threads > 1.

    Results come back in job order.
    """
    if threads <= 1:
        return [worker(*job) for job in jobs]

    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(max_workers=threads) as pool:
        tasks = [loop.run_in_executor(pool, worker, *job) for job in jobs]
        return list(await asyncio.gather(*tasks))


class StudyService:
    """Runs replication studies for one scenario."""

    def __init__(self, options: Optional[StudyOptions] = None):
        self.options = options or StudyOptions()

    async def _run_replicates(
        self, spec: ScenarioSpec, replicates: int, methods: List[StudyMethod], metric: MetricKind
    ) -> List[ReplicateRecord]:
        jobs = [(spec, i, methods, metric, self.options) for i in range(replicates)]
        records = await gather_in_pool(run_replicate, jobs, self.options.threads)
        return sorted(records, key=lambda r: r.index)

    def run_study(
        self,
        spec: ScenarioSpec,
        replicates: int,
        methods: Sequence[StudyMethod] = tuple(StudyMethod),
        metric: MetricKind = MetricKind.MISE,
    ) -> StudyReport:
        """
        Paired replication study.

        Args:
            spec: Scenario (its seed seeds every replicate)
            replicates: Number of replicates (>= 1)
            methods: Compared methods
            metric: mise (tractable scenarios only) or chi2

        Returns:
            StudyReport with per-method means, standard errors and exclusion counts

        Raises:
            ConfigurationError: mise requested for a scenario without a known intensity
        """
        metric = MetricKind(metric)
        methods = [StudyMethod(m) for m in methods]
        if replicates < 1:
            raise ConfigurationError(f"replicates must be >= 1, got {replicates}")
        if not methods:
            raise ConfigurationError("At least one method is required")
        if metric == MetricKind.MISE and not spec.family.has_tractable_intensity:
            raise ConfigurationError(
                f"MISE needs a known intensity; use chi2 for the {spec.family.display_name} family"
            )

        start = time.time()
        logger.info(
            f"Study {spec.name or spec.family.value}: {replicates} replicate(s), "
            f"methods={[m.value for m in methods]}, metric={metric.value}"
        )
        records = asyncio.run(self._run_replicates(spec, replicates, methods, metric))
        logger.info(f"Study finished in {time.time() - start:.1f}s")

        return StudyReport(
            scenario=spec,
            metric=metric,
            replicates=replicates,
            methods=summarise(records, methods),
            records=records,
            quadrats=self.options.quadrats if metric == MetricKind.CHI2 else None,
            raster=(self.options.nx, self.options.ny),
        )


def run_study(
    spec: ScenarioSpec,
    replicates: int,
    methods: Sequence[StudyMethod] = tuple(StudyMethod),
    metric: MetricKind = MetricKind.MISE,
    chi2_partition: Tuple[int, int] = (5, 5),
    options: Optional[StudyOptions] = None,
) -> StudyReport:
    """Functional entry point of StudyService.run_study."""
    options = options or StudyOptions()
    if tuple(chi2_partition) != tuple(options.quadrats):
        options = replace(options, quadrats=tuple(chi2_partition))
    return StudyService(options).run_study(spec, replicates, methods, metric)
