"""Tests for artifact files and the report tables."""
import json

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from src.core import MarkedPattern, ObservationWindow, PointPattern, RasterSurface
from src.errors import DataError, OutOfDomainError, SchemaError
from src.exporters import (
    ArtifactExporter,
    document_json,
    read_document,
    read_marked_pattern,
    read_pattern,
    read_scenario,
    read_surface,
    window_path_for,
)
from src.reporters import FigureReporter, TableReporter
from src.schemas import MethodSummary, ScenarioSpec, StudyReportDocument, WindowDocument


@pytest.fixture
def exporter(tmp_path):
    return ArtifactExporter(tmp_path)


class TestPatternFiles:

    def test_pattern_reloads_exactly(self, exporter, uniform_pattern):
        path = exporter.export_pattern(uniform_pattern, 'pattern.csv')
        assert window_path_for(path).exists()
        assert read_pattern(path).same_as(uniform_pattern)

    def test_relative_output_directory(self, tmp_path, monkeypatch, uniform_pattern):
        monkeypatch.chdir(tmp_path)
        path = ArtifactExporter('sims').export_pattern(uniform_pattern, 'rep_0001.csv')
        assert (tmp_path / 'sims' / 'rep_0001.csv').exists()
        assert (tmp_path / 'sims' / 'rep_0001.window.json').exists()
        assert read_pattern(path).same_as(uniform_pattern)

    def test_marked_pattern(self, exporter, uniform_pattern, rng):
        marked = MarkedPattern(uniform_pattern, rng.uniform(1, 2, uniform_pattern.n))
        loaded = read_marked_pattern(exporter.export_marked_pattern(marked, 'phi_star.csv'))
        assert np.array_equal(loaded.marks, marked.marks)
        assert loaded.pattern.same_as(uniform_pattern)

    def test_explicit_window_file(self, tmp_path):
        (tmp_path / 'p.csv').write_text("x,y\n1.5,0.5\n")
        (tmp_path / 'w.json').write_text(json.dumps({'x_min': 0, 'x_max': 2, 'y_min': 0, 'y_max': 1}))
        p = read_pattern(tmp_path / 'p.csv', tmp_path / 'w.json')
        assert p.window == ObservationWindow(0.0, 2.0, 0.0, 1.0)

    def test_missing_sidecar(self, tmp_path):
        (tmp_path / 'p.csv').write_text("x,y\n0.5,0.5\n")
        with pytest.raises(FileNotFoundError):
            read_pattern(tmp_path / 'p.csv')

    def test_missing_column(self, tmp_path, exporter, uniform_pattern):
        path = exporter.export_pattern(uniform_pattern, 'p.csv')
        path.write_text("lon,lat\n0.5,0.5\n")
        with pytest.raises(SchemaError):
            read_pattern(path)

    def test_non_numeric_value(self, exporter, uniform_pattern):
        path = exporter.export_pattern(uniform_pattern, 'p.csv')
        path.write_text("x,y\n0.5,north\n")
        with pytest.raises(DataError):
            read_pattern(path)

    def test_point_outside_window(self, exporter, uniform_pattern):
        path = exporter.export_pattern(uniform_pattern, 'p.csv')
        path.write_text("x,y\n0.5,1.5\n")
        with pytest.raises(OutOfDomainError):
            read_pattern(path)


class TestSurfaceFiles:

    def test_surface_reloads_exactly(self, exporter, rng):
        w = ObservationWindow(0.0, 2.0, -1.0, 1.0)
        surface = RasterSurface(w, 5, 3, rng.normal(size=(3, 5)))
        loaded = read_surface(exporter.export_surface(surface, 'field.surface'))
        assert loaded.same_grid(surface)
        assert np.array_equal(loaded.values, surface.values)

    def test_bad_header(self, tmp_path):
        (tmp_path / 'bad.surface').write_text("not json\n1,2\n")
        with pytest.raises(SchemaError):
            read_surface(tmp_path / 'bad.surface')


class TestDocuments:

    def test_document_json_is_sorted(self):
        text = document_json(WindowDocument(x_max=2.0))
        assert list(json.loads(text)) == ['x_max', 'x_min', 'y_max', 'y_min']
        assert text.endswith("\n")

    def test_scenario_round_trip(self, exporter):
        spec = ScenarioSpec(family='thomas', parameters={'kappa': 20.0}, seed=9, name='thomas_1')
        assert read_scenario(exporter.export_document(spec, 'scenario.json')) == spec

    def test_scenario_rejects_unknown_field(self, tmp_path):
        (tmp_path / 's.json').write_text(json.dumps({'family': 'thomas', 'colour': 'red'}))
        with pytest.raises(ValidationError):
            read_scenario(tmp_path / 's.json')

    def test_window_extent_is_validated(self, tmp_path):
        (tmp_path / 'w.json').write_text(json.dumps({'x_min': 1.0, 'x_max': 0.0}))
        with pytest.raises(ValidationError):
            read_document(tmp_path / 'w.json', WindowDocument)


def _study_document():
    return StudyReportDocument(
        scenario=ScenarioSpec(family='poisson_homog', parameters={'rho': 125.0}),
        metric='mise',
        replicates=2,
        methods=[
            MethodSummary(method='KS', mean=3.0, standard_error=0.5, replicates_used=2),
            MethodSummary(method='none', mean=1.0, standard_error=0.1, replicates_used=2),
            MethodSummary(method='I', mean=None, replicates_used=0, excluded=2),
        ],
        raster=[32, 32],
    )


class TestTableReporter:

    def test_study_frame_has_one_row_per_method(self):
        frame = TableReporter().study_frame(_study_document())
        assert isinstance(frame, pd.DataFrame)
        assert len(frame) == 3
        assert 'method' in frame.columns

    def test_study_table_lists_methods(self):
        text = TableReporter().generate_study_table(_study_document())
        for label in ("unpenalised", "I", "KS"):
            assert label in text
        assert "n/a" in text
        assert text.index("unpenalised") < text.index("KS")

    def test_local_k_frame(self):
        frame = TableReporter.local_k_frame(np.array([0.1, 0.2]), {'k_pois': np.pi * np.array([0.01, 0.04])})
        assert list(frame.columns)[0] == 'r'
        assert frame.shape == (2, 2)


class TestFigureReporter:

    def test_heatmap_writes_png(self, tmp_path, uniform_pattern):
        surface = RasterSurface.constant(uniform_pattern.window, 8, 8, 1.0)
        path = FigureReporter(tmp_path / 'figs').heatmap(surface, "flat.png", "Flat surface", pattern=uniform_pattern)
        assert path.exists()
        assert path.suffix == '.png'
