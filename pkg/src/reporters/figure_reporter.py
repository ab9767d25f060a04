"""
Figure reporter: static heatmaps and diagnostic plots.

Figures are drawn from artifacts that were already written to disk, so
plotting never feeds back into numeric outputs.
"""
import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from src.core import MarkedPattern, PointPattern, RasterSurface  # noqa: E402

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class FigureReporter:
    """Writes PNG figures below an output directory."""

    COLOUR_MAP = "viridis"
    DIVERGING_MAP = "RdBu_r"
    DPI = 120

    def __init__(self, output_dir: PathLike = "."):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def _save(self, fig, name: str) -> Path:
        path = self.output_dir / name
        fig.savefig(path, dpi=self.DPI, bbox_inches='tight')
        plt.close(fig)
        logger.debug(f"Wrote figure {path}")
        return path

    @staticmethod
    def _extent(surface: RasterSurface):
        w = surface.window
        return (w.x_min, w.x_max, w.y_min, w.y_max)

    def heatmap(
        self,
        surface: RasterSurface,
        name: str,
        title: str = "",
        pattern: Optional[PointPattern] = None,
        diverging: bool = False,
    ) -> Path:
        """
        Heatmap of a raster surface, optionally overlaid with the data points.

        Args:
            surface: Surface to draw (row 0 at the bottom)
            name: Output file name
            title: Axes title
            pattern: Points drawn on top
            diverging: Symmetric colour range around zero (residuals)
        """
        fig, ax = plt.subplots(figsize=(5, 4.5))
        values = np.asarray(surface.values)
        kwargs = {'cmap': self.COLOUR_MAP}
        if diverging:
            limit = float(np.max(np.abs(values))) or 1.0
            kwargs = {'cmap': self.DIVERGING_MAP, 'vmin': -limit, 'vmax': limit}
        image = ax.imshow(values, origin='lower', extent=self._extent(surface), aspect='equal', **kwargs)
        if pattern is not None and pattern.n:
            ax.scatter(pattern.x, pattern.y, s=4, c='k', marker='.')
        fig.colorbar(image, ax=ax, shrink=0.85)
        ax.set_title(title)
        return self._save(fig, name)

    def mark_map(self, marked: MarkedPattern, name: str, title: str = "phi* at data points") -> Path:
        """Points coloured and sized by their interaction weight."""
        fig, ax = plt.subplots(figsize=(5, 4.5))
        marks = np.asarray(marked.marks)
        spread = np.ptp(marks) if marks.size else 0.0
        sizes = 10 + 40 * (marks - marks.min()) / spread if spread > 0 else np.full(marks.shape, 20.0)
        points = ax.scatter(marked.pattern.x, marked.pattern.y, c=marks, s=sizes, cmap=self.COLOUR_MAP)
        w = marked.window
        ax.set_xlim(w.x_min, w.x_max)
        ax.set_ylim(w.y_min, w.y_max)
        ax.set_aspect('equal')
        fig.colorbar(points, ax=ax, shrink=0.85)
        ax.set_title(title)
        return self._save(fig, name)

    def global_k(self, r_values: Sequence[float], k_values: Sequence[float], name: str) -> Path:
        """Global K estimate against the Poisson benchmark pi r^2."""
        r = np.asarray(r_values, dtype=float)
        fig, ax = plt.subplots(figsize=(5, 4))
        ax.plot(r, np.asarray(k_values, dtype=float), label="estimate")
        ax.plot(r, np.pi * r ** 2, linestyle='--', color='grey', label="Poisson")
        ax.set_xlabel("r")
        ax.set_ylabel("K(r)")
        ax.legend()
        return self._save(fig, name)

    def local_k_curves(
        self, r_values: Sequence[float], local_k: np.ndarray, marks: Sequence[float], name: str
    ) -> Path:
        """Every local K curve, coloured by the point's interaction weight."""
        r = np.asarray(r_values, dtype=float)
        curves = np.atleast_2d(np.asarray(local_k, dtype=float))
        marks = np.asarray(marks, dtype=float)
        norm = plt.Normalize(vmin=float(marks.min()), vmax=float(marks.max()))
        cmap = plt.get_cmap(self.COLOUR_MAP)
        fig, ax = plt.subplots(figsize=(5, 4))
        for curve, mark in zip(curves, marks):
            ax.plot(r, curve, color=cmap(norm(mark)), linewidth=0.6, alpha=0.7)
        ax.plot(r, np.pi * r ** 2, color='k', linestyle='--', linewidth=1.2)
        fig.colorbar(plt.cm.ScalarMappable(norm=norm, cmap=cmap), ax=ax, label="phi*")
        ax.set_xlabel("r")
        ax.set_ylabel("local K(r)")
        return self._save(fig, name)

    def mark_boxplot(self, marks: Sequence[float], name: str) -> Path:
        fig, ax = plt.subplots(figsize=(3, 4))
        ax.boxplot(np.asarray(marks, dtype=float))
        ax.set_xticks([1])
        ax.set_xticklabels(["phi*"])
        return self._save(fig, name)
