"""
File formats of the pipeline.

- Point patterns: CSV with header `x,y` plus a sidecar `<stem>.window.json`
- Marked patterns: CSV with header `x,y,phi_star` plus the same sidecar
- Surfaces: one JSON header line (window, nx, ny) followed by ny CSV rows of
  nx values, rows ordered from y_min upward
- Documents: pydantic models written as JSON with sorted keys

Floats are written with 17 significant digits so files reload exactly.
"""
import io
import json
import logging
import os
from pathlib import Path
from typing import Optional, Type, TypeVar, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel

from src.core import MarkedPattern, PointPattern, RasterSurface
from src.errors import DataError, SchemaError
from src.schemas import ScenarioSpec, WindowDocument

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'
PathLike = Union[str, Path]
Document = TypeVar('Document', bound=BaseModel)


def window_path_for(pattern_path: PathLike) -> Path:
    """Sidecar window path `<stem>.window.json` of a pattern CSV."""
    path = Path(pattern_path)
    return path.with_name(f"{path.stem}.window.json")


def _ensure_parent(path: PathLike) -> Path:
    path = Path(path)
    if path.parent and not path.parent.exists():
        os.makedirs(path.parent, exist_ok=True)
    return path


# =============================================================================
# Readers
# =============================================================================

def read_document(path: PathLike, model: Type[Document]) -> Document:
    """Load and validate a JSON document (pydantic ValidationError on mismatch)."""
    with open(path, 'r') as f:
        return model.model_validate_json(f.read())


def read_window(path: PathLike) -> WindowDocument:
    return read_document(path, WindowDocument)


def read_scenario(path: PathLike) -> ScenarioSpec:
    return read_document(path, ScenarioSpec)


def _read_points_frame(path: PathLike, columns) -> pd.DataFrame:
    frame = pd.read_csv(path)
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise SchemaError(f"{path}: missing column(s) {missing}; expected header {','.join(columns)}")
    try:
        return frame[list(columns)].astype(float)
    except ValueError as e:
        raise DataError(f"{path}: non-numeric values ({e})") from e


def read_pattern(path: PathLike, window_path: Optional[PathLike] = None) -> PointPattern:
    """
    Load a pattern CSV and its window sidecar.

    Raises:
        FileNotFoundError: CSV or sidecar missing
        OutOfDomainError: a point lies outside the window
    """
    window = read_window(window_path or window_path_for(path)).to_window()
    frame = _read_points_frame(path, ('x', 'y'))
    return PointPattern(frame.to_numpy(), window)


def read_marked_pattern(path: PathLike, window_path: Optional[PathLike] = None) -> MarkedPattern:
    window = read_window(window_path or window_path_for(path)).to_window()
    frame = _read_points_frame(path, ('x', 'y', 'phi_star'))
    return MarkedPattern(PointPattern(frame[['x', 'y']].to_numpy(), window), frame['phi_star'].to_numpy())


def read_surface(path: PathLike) -> RasterSurface:
    """Load a surface file (JSON header line + row-major CSV)."""
    with open(path, 'r') as f:
        header_line = f.readline()
        body = f.read()
    try:
        header = json.loads(header_line)
        window = WindowDocument(**header['window']).to_window()
        nx, ny = int(header['nx']), int(header['ny'])
    except (ValueError, KeyError, TypeError) as e:
        raise SchemaError(f"{path}: invalid surface header ({e})") from e
    values = pd.read_csv(io.StringIO(body), header=None).to_numpy(dtype=float)
    return RasterSurface(window, nx, ny, values)


# =============================================================================
# Writers
# =============================================================================

def document_json(doc: BaseModel) -> str:
    """Deterministic JSON text of a document."""
    return json.dumps(doc.model_dump(mode='json'), sort_keys=True, indent=2) + "\n"


class ArtifactExporter:
    """Writes pipeline artifacts below an output directory."""

    def __init__(self, output_dir: PathLike = "."):
        """
        Args:
            output_dir: Directory that relative file names are resolved against
        """
        self.output_dir = Path(output_dir)

    def _path(self, name: PathLike) -> Path:
        path = Path(name)
        return _ensure_parent(path if path.is_absolute() else self.output_dir / path)

    @staticmethod
    def _write_document(doc: BaseModel, path: Path) -> Path:
        path.write_text(document_json(doc))
        logger.debug(f"Wrote {type(doc).__name__} to {path}")
        return path

    def export_document(self, doc: BaseModel, name: PathLike) -> Path:
        return self._write_document(doc, self._path(name))

    def _write_sidecar(self, pattern: PointPattern, csv_path: Path) -> None:
        self._write_document(WindowDocument.from_window(pattern.window), window_path_for(csv_path))

    def export_pattern(self, pattern: PointPattern, name: PathLike) -> Path:
        """Write `x,y` CSV plus window sidecar; returns the CSV path."""
        path = self._path(name)
        frame = pd.DataFrame(pattern.points, columns=['x', 'y'])
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
        self._write_sidecar(pattern, path)
        return path

    def export_marked_pattern(self, marked: MarkedPattern, name: PathLike) -> Path:
        path = self._path(name)
        frame = pd.DataFrame({'x': marked.pattern.x, 'y': marked.pattern.y, 'phi_star': marked.marks})
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
        self._write_sidecar(marked.pattern, path)
        return path

    def export_surface(self, surface: RasterSurface, name: PathLike) -> Path:
        path = self._path(name)
        header = {'window': surface.window.to_dict(), 'nx': surface.nx, 'ny': surface.ny}
        body = pd.DataFrame(np.asarray(surface.values)).to_csv(header=False, index=False, float_format=FLOAT_FORMAT)
        path.write_text(json.dumps(header, sort_keys=True) + "\n" + body)
        return path

    def export_table(self, frame: pd.DataFrame, name: PathLike) -> Path:
        path = self._path(name)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
        return path
