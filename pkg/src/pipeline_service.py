"""
Pipeline service: handlers for the CLI subcommands.

Each handler is a pure function of the run configuration and its input
files. Documents carry the effective configuration under "config".

Subcommands:
    simulate : simulate replicates of a scenario or preset
    localk   : local and global K-functions of a pattern
    phistar  : point-level interaction weights and their offset surface
    fit      : penalised (or plain) Poisson fit of a pattern
    gof      : Pearson quadrat statistic of a fitted surface
    study    : paired replication study
    report   : four-model comparison with offsets, fits, residuals and figures
"""
import asyncio
import logging
import time
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from src.config import RunConfig
from src.core import MarkedPattern, PointPattern, surface_integral
from src.enums import EdgeCorrection, InterpolationMethod, MetricKind, OffsetMode, OutputFormat, StudyMethod
from src.errors import ConfigurationError
from src.exporters import (
    ArtifactExporter,
    read_document,
    read_marked_pattern,
    read_pattern,
    read_scenario,
    read_surface,
)
from src.fit import (
    FitResult,
    ModelSpec,
    fit_poisson,
    kernel_intensity,
    likelihood_cv_bandwidth,
    make_quadrature,
    offset_model,
    predict_intensity,
    smoothed_raw_residuals,
)
from src.interaction import DiscrepancySpec, InterpolationSpec, interpolate, phi_star_at_points, resolve_bandwidth
from src.localstats import GlobalKFunction, RadiusGrid, local_k_matrix
from src.reporters import FigureReporter, TableReporter
from src.schemas import (
    AICComparisonDocument,
    AICEntry,
    ChiSquareDocument,
    FitResultDocument,
    LocalKDocument,
    ModelDocument,
    PhiStarDocument,
    ScenarioSpec,
    SimulationManifest,
    StudyReportDocument,
    WindowDocument,
)
from src.simulators import SimulatorFactory, get_preset
from src.study_service import StudyOptions, StudyService, gather_in_pool
from src.utils.calculations import derive_seed
from src.validators import QuadratPartition, pearson_chi2

logger = logging.getLogger(__name__)

# --offset choice -> compared method
OFFSET_METHODS = {
    'none': StudyMethod.NONE,
    'indicator': StudyMethod.INDICATOR,
    'idw': StudyMethod.IDW,
    'kernel': StudyMethod.KERNEL,
}

REPORT_METHODS = (StudyMethod.NONE, StudyMethod.INDICATOR, StudyMethod.IDW, StudyMethod.KERNEL)


def simulate_replicate(spec: ScenarioSpec, index: int) -> PointPattern:
    """Replicate `index` of a scenario (seeded by derive_seed(spec.seed, index))."""
    return SimulatorFactory.create_simulator(spec).simulate(derive_seed(spec.seed, index))


def fit_document(result: FitResult, config: Dict) -> FitResultDocument:
    names = result.parameter_names
    return FitResultDocument(
        theta={name: float(v) for name, v in zip(names, result.theta)},
        standard_errors={name: float(v) for name, v in zip(names, result.standard_errors)},
        covariance=np.asarray(result.covariance, dtype=float).tolist(),
        log_likelihood=float(result.log_likelihood),
        aic=float(result.aic),
        penalty=float(result.penalty),
        converged=bool(result.converged),
        iterations=int(result.iterations),
        n_points=int(result.n_points),
        model=ModelDocument(**result.model.describe()),
        config=config,
    )


class PipelineService:
    """Runs one CLI subcommand for a validated RunConfig."""

    def __init__(self, run_config: RunConfig, quiet: bool = False):
        """
        Args:
            run_config: Effective configuration
            quiet: Suppress progress lines on stdout
        """
        self.rc = run_config
        self.quiet = quiet
        self.config_echo = run_config.to_dict()
        self.tables = TableReporter()
        self.handlers = {
            'simulate': self.simulate,
            'localk': self.localk,
            'phistar': self.phistar,
            'fit': self.fit,
            'gof': self.gof,
            'study': self.study,
            'report': self.report,
        }

    def _print(self, message: str = "") -> None:
        if not self.quiet:
            print(message)

    def run(self) -> int:
        """Dispatch to the subcommand handler; returns the exit status."""
        handler = self.handlers.get(self.rc.subcommand)
        if handler is None:
            raise ConfigurationError(f"Unknown subcommand: {self.rc.subcommand!r}")
        start = time.time()
        handler()
        logger.info(f"{self.rc.subcommand} finished in {time.time() - start:.1f}s")
        return 0

    # =========================================================================
    # Input helpers
    # =========================================================================

    def _require_path(self, key: str) -> str:
        value = self.rc.paths.get(key)
        if not value:
            raise ConfigurationError(f"--{key.replace('_', '-')} is required for '{self.rc.subcommand}'")
        return value

    def _pattern(self) -> PointPattern:
        pattern = read_pattern(self._require_path('pattern'), self.rc.paths.get('window'))
        self._print(f"   ✅ Loaded {pattern.n} points")
        return pattern

    def _scenario(self) -> ScenarioSpec:
        """Scenario from --scenario FILE or --preset NAME; --seed overrides the file's seed."""
        if self.rc.paths.get('scenario'):
            spec = read_scenario(self.rc.paths['scenario'])
            if self.rc.seed_override is not None:
                spec = spec.with_seed(self.rc.seed_override)
            return spec
        if self.rc.paths.get('preset'):
            window = WindowDocument.from_window(self._pattern().window) if self.rc.paths.get('pattern') else None
            return get_preset(self.rc.paths['preset'], seed=self.rc.runtime.seed, window=window)
        raise ConfigurationError(f"'{self.rc.subcommand}' needs --scenario FILE or --preset NAME")

    def _out_dir(self) -> Path:
        out = Path(self._require_path('out'))
        out.mkdir(parents=True, exist_ok=True)
        return out

    def _radius_grid(self, pattern: PointPattern) -> RadiusGrid:
        s = self.rc.localstats
        return RadiusGrid.default_for(pattern.window, s.radius_count, s.r_max, s.r0)

    def _discrepancy(self) -> DiscrepancySpec:
        s = self.rc.interaction
        return DiscrepancySpec(s.discrepancy, s.exponent, s.signed)

    def _interpolation(self) -> InterpolationSpec:
        s = self.rc.interaction
        return InterpolationSpec(s.interpolation, s.idw_power, s.kernel_bandwidth)

    def _marks(self, pattern: PointPattern) -> MarkedPattern:
        """phi* marks from --marks FILE when given, computed from the pattern otherwise."""
        if self.rc.paths.get('marks'):
            marked = read_marked_pattern(self.rc.paths['marks'])
            if not marked.pattern.same_as(pattern):
                raise ConfigurationError("--marks file does not match --pattern points")
            return marked
        return phi_star_at_points(pattern, self._radius_grid(pattern), self._discrepancy())

    def _covariates(self) -> Dict[str, object]:
        """Covariate surfaces read from `name=path`; bare names resolve to coordinate covariates."""
        return {name: read_surface(path) for name, path in self.rc.covariates.items() if path}

    def _fit(self, pattern: PointPattern, model: ModelSpec, covariates, quadrature=None) -> FitResult:
        f = self.rc.fit
        return fit_poisson(
            pattern, covariates, model, quadrature or make_quadrature(pattern, f.dummy_per_side),
            max_iterations=f.max_iterations, gradient_tol=f.gradient_tol, objective_tol=f.objective_tol,
        )

    def _local_k_document(self, pattern: PointPattern, grid: RadiusGrid) -> LocalKDocument:
        matrix = local_k_matrix(pattern, grid)
        overall = GlobalKFunction(grid, matrix.mean(axis=0))
        return LocalKDocument(
            r_values=grid.r_values.tolist(),
            local_k=matrix.tolist(),
            global_k=overall.k_values.tolist(),
            k_pois=overall.benchmark().tolist(),
            n_points=pattern.n,
            window=WindowDocument.from_window(pattern.window),
            config=self.config_echo,
        )

    def _write_table(self, exporter: ArtifactExporter, frame, json_path: Path) -> Optional[Path]:
        if OutputFormat(self.rc.runtime.format) == OutputFormat.CSV:
            return exporter.export_table(frame, json_path.with_suffix('.csv'))
        return None

    # =========================================================================
    # Subcommands
    # =========================================================================

    def simulate(self) -> None:
        spec = self._scenario()
        replicates = self.rc.simulation.replicates
        out = self._out_dir()
        exporter = ArtifactExporter(out)

        self._print(f"\n📥 Step 1: Simulating {replicates} replicate(s) of {spec.name or spec.family.value}...")
        jobs = [(spec, i) for i in range(replicates)]
        patterns = asyncio.run(gather_in_pool(simulate_replicate, jobs, self.rc.runtime.threads))

        files, counts = [], []
        for i, pattern in enumerate(patterns):
            name = f"rep_{i + 1:04d}.csv"
            exporter.export_pattern(pattern, name)
            files.append(name)
            counts.append(pattern.n)
        manifest = SimulationManifest(
            scenario=spec,
            replicates=replicates,
            seeds=[derive_seed(spec.seed, i) for i in range(replicates)],
            files=files,
            counts=counts,
            config=self.config_echo,
        )
        exporter.export_document(manifest, 'manifest.json')
        self._print(f"   ✅ Wrote {replicates} pattern(s) to {out} (mean count {np.mean(counts):.1f})")

    def localk(self) -> None:
        pattern = self._pattern()
        grid = self._radius_grid(pattern)
        out = Path(self._require_path('out'))
        exporter = ArtifactExporter()

        self._print(f"\n📊 Computing local K-functions on {len(grid)} radii...")
        doc = self._local_k_document(pattern, grid)
        exporter.export_document(doc, out)
        columns = {'global_k': doc.global_k, 'k_pois': doc.k_pois}
        columns.update({f"k_{i}": row for i, row in enumerate(doc.local_k)})
        self._write_table(exporter, TableReporter.local_k_frame(doc.r_values, columns), out)
        self._print(f"   ✅ Local K of {pattern.n} points written to {out}")

    def _phistar_outputs(self, pattern: PointPattern, out: Path, exporter: ArtifactExporter):
        marked = self._marks(pattern)
        spec = self._interpolation()
        bandwidth = resolve_bandwidth(marked, spec) if spec.method == InterpolationMethod.KERNEL else None
        spec = InterpolationSpec(spec.method, spec.idw_power, bandwidth)
        surface = interpolate(marked, spec, self.rc.raster.nx, self.rc.raster.ny)
        marks_path = exporter.export_marked_pattern(marked, out / 'phi_star.csv')
        surface_path = exporter.export_surface(surface, out / f"offset_{spec.method.value}.surface")
        return marked, spec, marks_path, surface_path

    def phistar(self) -> None:
        pattern = self._pattern()
        out = self._out_dir()
        exporter = ArtifactExporter()

        self._print("\n📊 Computing phi* marks and offset surface...")
        marked, spec, marks_path, surface_path = self._phistar_outputs(pattern, out, exporter)
        marks = np.asarray(marked.marks)
        discrepancy = self._discrepancy()
        doc = PhiStarDocument(
            discrepancy=discrepancy.kind.value,
            exponent=discrepancy.exponent,
            signed=discrepancy.signed,
            interpolation=spec.method.value,
            bandwidth=spec.kernel_bandwidth,
            n_points=pattern.n,
            median=float(np.median(marks)),
            minimum=float(marks.min()),
            maximum=float(marks.max()),
            marks_file=marks_path.name,
            surface_file=surface_path.name,
            config=self.config_echo,
        )
        exporter.export_document(doc, out / 'phistar.json')
        self._print(f"   ✅ phi* median {doc.median:.4g} (range {doc.minimum:.4g} - {doc.maximum:.4g})")

    def fit(self) -> None:
        pattern = self._pattern()
        covariates = self._covariates()
        names = tuple(self.rc.covariates)
        method = OFFSET_METHODS[self.rc.offset]

        self._print(f"\n📊 Fitting Poisson model (offset: {self.rc.offset}, covariates: {list(names) or 'none'})...")
        if self.rc.paths.get('offset_surface'):
            model = ModelSpec(names, OffsetMode.SURFACE, offset_surface=read_surface(self.rc.paths['offset_surface']),
                              label='surface')
        elif method == StudyMethod.NONE:
            model = offset_model(method, None, names)
        else:
            model = offset_model(method, self._marks(pattern), names, self._interpolation(),
                                 self.rc.raster.nx, self.rc.raster.ny)
        result = self._fit(pattern, model, covariates)
        doc = fit_document(result, self.config_echo)
        exporter = ArtifactExporter()
        exporter.export_document(doc, self._require_path('out'))
        if self.rc.paths.get('fitted'):
            exporter.export_surface(predict_intensity(result, nx=self.rc.raster.nx, ny=self.rc.raster.ny),
                                    self.rc.paths['fitted'])
        self._print(self.tables.generate_fit_table(doc))
        if not result.converged:
            self._print("   ⚠️ Fit did not converge")

    def gof(self) -> None:
        pattern = self._pattern()
        fitted = read_surface(self._require_path('fitted'))
        s = self.rc.study
        statistic = pearson_chi2(pattern, fitted, QuadratPartition(pattern.window, s.quadrat_rows, s.quadrat_cols))
        doc = ChiSquareDocument(
            statistic=float(statistic),
            rows=s.quadrat_rows,
            cols=s.quadrat_cols,
            n_points=pattern.n,
            fitted_mass=float(surface_integral(fitted)),
            config=self.config_echo,
        )
        ArtifactExporter().export_document(doc, self._require_path('out'))
        self._print(f"   ✅ Pearson chi2 = {statistic:.4f} on {s.quadrat_rows}x{s.quadrat_cols} quadrats")

    def study(self) -> None:
        spec = self._scenario()
        s = self.rc.study
        methods = [StudyMethod.from_string(m) for m in s.methods]
        metric = MetricKind(s.metric)
        out = Path(self._require_path('out'))

        self._print(f"\n📥 Running study: {s.replicates} replicate(s), metric {metric.value}...")
        report = StudyService(StudyOptions.from_run_config(self.rc)).run_study(spec, s.replicates, methods, metric)
        doc = StudyReportDocument(
            scenario=report.scenario,
            metric=report.metric,
            replicates=report.replicates,
            methods=report.methods,
            quadrats=list(report.quadrats) if report.quadrats else None,
            raster=list(report.raster),
            config=self.config_echo,
        )
        exporter = ArtifactExporter()
        exporter.export_document(doc, out)
        self._write_table(exporter, self.tables.study_frame(doc), out)
        self._print(self.tables.generate_study_table(doc))

    def report(self) -> None:
        """
        Four-model comparison of one pattern (unpenalised, I, IDW, KS).

        Writes marks, offsets, fitted intensities, smoothed residuals, the
        kernel intensity, the global K-function, an AIC comparison and the
        figures drawn from those files.
        """
        pattern = self._pattern()
        out = self._out_dir()
        exporter = ArtifactExporter()
        figures = FigureReporter(out / 'figures')
        nx, ny = self.rc.raster.nx, self.rc.raster.ny
        covariates = self._covariates()
        names = tuple(self.rc.covariates)

        self._print("\n📊 Step 1: Local K-functions and phi* marks...")
        grid = self._radius_grid(pattern)
        marked = phi_star_at_points(pattern, grid, self._discrepancy())
        exporter.export_marked_pattern(marked, out / 'phi_star.csv')
        global_doc = self._local_k_document(pattern, grid)
        exporter.export_document(global_doc, out / 'localk.json')
        self._print(f"   ✅ phi* median {float(np.median(marked.marks)):.4g}")

        self._print("\n📊 Step 2: Fitting the four models...")
        quadrature = make_quadrature(pattern, self.rc.fit.dummy_per_side)
        residual_h = self.rc.fit.residual_bandwidth or likelihood_cv_bandwidth(pattern)
        entries: List[AICEntry] = []
        for method in REPORT_METHODS:
            tag = method.value.lower()
            marks = None if method == StudyMethod.NONE else marked
            model = offset_model(method, marks, names, self._interpolation(), nx, ny)
            if model.offset_mode == OffsetMode.SURFACE:
                exporter.export_surface(model.offset_surface, out / f"offset_{tag}.surface")
            result = self._fit(pattern, model, covariates, quadrature)
            exporter.export_document(fit_document(result, self.config_echo), out / f"fit_{tag}.json")
            fitted = predict_intensity(result, nx=nx, ny=ny)
            exporter.export_surface(fitted, out / f"intensity_{tag}.surface")
            exporter.export_surface(smoothed_raw_residuals(pattern, fitted, residual_h),
                                    out / f"residuals_{tag}.surface")
            entries.append(AICEntry(
                label=method.display_name,
                aic=float(result.aic),
                log_likelihood=float(result.log_likelihood),
                penalty=float(result.penalty),
                converged=bool(result.converged),
                theta={n: float(v) for n, v in zip(result.parameter_names, result.theta)},
            ))
            status = "✅" if result.converged else "⚠️"
            self._print(f"   {status} {method.display_name}: AIC {result.aic:.2f}")

        display = kernel_intensity(
            pattern, self.rc.fit.intensity_bandwidth or 'auto', nx, ny, EdgeCorrection(self.rc.fit.edge_correction)
        )
        exporter.export_surface(display, out / 'kernel_intensity.surface')

        doc = AICComparisonDocument(
            models=entries,
            ordering=[e.label for e in sorted(entries, key=lambda e: e.aic)],
            n_points=pattern.n,
            config=self.config_echo,
        )
        exporter.export_document(doc, out / 'aic.json')
        self._write_table(exporter, self.tables.aic_frame(doc), out / 'aic.json')
        self._print(self.tables.generate_aic_table(doc))

        self._print("\n🖼️  Step 3: Drawing figures...")
        self._draw_report_figures(out, figures)
        self._print(f"   ✅ Figures written to {figures.output_dir}")

    def _draw_report_figures(self, out: Path, figures: FigureReporter) -> None:
        """Figures are drawn from the files written by `report`."""
        marked = read_marked_pattern(out / 'phi_star.csv')
        pattern = marked.pattern
        figures.mark_map(marked, 'phi_star_points.png')
        figures.mark_boxplot(marked.marks, 'phi_star_boxplot.png')
        for path in sorted(out.glob('offset_*.surface')):
            figures.heatmap(read_surface(path), f"{path.stem}.png", title=f"Offset {path.stem[7:]}")
        for path in sorted(out.glob('intensity_*.surface')):
            figures.heatmap(read_surface(path), f"{path.stem}.png", title=f"Fitted intensity ({path.stem[10:]})",
                            pattern=pattern)
        for path in sorted(out.glob('residuals_*.surface')):
            figures.heatmap(read_surface(path), f"{path.stem}.png", title=f"Smoothed residuals ({path.stem[10:]})",
                            diverging=True)
        display = read_surface(out / 'kernel_intensity.surface')
        figures.heatmap(display, 'kernel_intensity.png', title="Kernel intensity", pattern=pattern)
        # I weights the data terms only, so its integral-term offset is 1 everywhere
        figures.heatmap(display.with_values(np.ones(display.shape)), 'offset_i.png', title="Offset I (unit surface)")
        localk = read_document(out / 'localk.json', LocalKDocument)
        figures.global_k(localk.r_values, localk.global_k, 'global_k.png')
        figures.local_k_curves(localk.r_values, np.asarray(localk.local_k), marked.marks, 'local_k_curves.png')


def cmd_pipeline(run_config: RunConfig, quiet: bool = False) -> int:
    """Run the configured subcommand; returns exit status 0 on success."""
    return PipelineService(run_config, quiet).run()
