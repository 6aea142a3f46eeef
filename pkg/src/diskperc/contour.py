"""Equipotential curves of a solved field and their cell rasterization.

Level curves are traced by marching squares on the lattice of cell
centers; each lattice square contributes straight segments whose endpoints
are linearly interpolated along the square's edges.  Segments are then
stamped back onto the original lattice to produce binary curve masks for
geometric analysis.  A complementary view partitions the field itself into
near-flat connected patches whose internal potential range stays below a
small slack.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels, gridio

SEGMENT_HEADER = "level,x0,y0,x1,y1"

DEFAULT_LEVELS = tuple(i / 10 for i in range(1, 10))
DEFAULT_FLATNESS = 0.0125


@dataclass(frozen=True)
class ContourSet:
    """Marching-squares segments per level, in lattice coordinates
    (x = column, y = row, row 0 = bottom)."""

    shape: tuple[int, int]
    levels: tuple[float, ...]
    segments: dict[float, np.ndarray]

    def total_segments(self) -> int:
        return sum(len(s) for s in self.segments.values())


@dataclass(frozen=True)
class ContourMask:
    """Cells touched by the traced curves (pooled over `levels`)."""

    cells: np.ndarray
    levels: tuple[float, ...]


@dataclass(frozen=True)
class QuasiClusterLabeling:
    """Connected near-flat patches; labels follow raster scan order."""

    labels: np.ndarray
    flatness: float

    @property
    def count(self) -> int:
        return int(self.labels.max()) + 1

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels.ravel(), minlength=self.count)


def extract_levels(phi, levels=DEFAULT_LEVELS) -> ContourSet:
    """Trace the given potential levels through a field.

    Accepts a plain 2-D array or any object with a `phi` array attribute
    (a solved potential grid).
    """
    phi = getattr(phi, "phi", phi)
    phi = np.ascontiguousarray(phi, dtype=np.float64)
    levels = tuple(float(v) for v in levels)
    segments = {}
    for level in levels:
        if not 0.0 <= level <= 1.0:
            raise ValueError(f"level {level} outside the potential range")
        segments[level] = _kernels.march(phi, level)
    return ContourSet(shape=phi.shape, levels=levels, segments=segments)


def rasterize_level(contours: ContourSet, level: float) -> np.ndarray:
    """Binary mask of one level's curve on the source lattice."""
    mask = np.zeros(contours.shape, dtype=np.uint8)
    _kernels.mark_segments(mask, contours.segments[level])
    return mask


def rasterize_contours(contours: ContourSet, levels=None) -> ContourMask:
    """Pooled binary mask of several level curves (all levels by default)."""
    chosen = contours.levels if levels is None else tuple(float(v) for v in levels)
    mask = np.zeros(contours.shape, dtype=np.uint8)
    for level in chosen:
        _kernels.mark_segments(mask, contours.segments[level])
    return ContourMask(cells=mask, levels=chosen)


def segment_quasi_clusters(phi, flatness: float = DEFAULT_FLATNESS
                           ) -> QuasiClusterLabeling:
    """Partition the field into connected patches whose potential range
    (max - min within the patch) never exceeds `flatness`.

    Accepts a plain 2-D array or an object with a `phi` array attribute.
    """
    if flatness <= 0:
        raise ValueError("flatness must be positive")
    phi = getattr(phi, "phi", phi)
    phi = np.ascontiguousarray(phi, dtype=np.float64)
    # kernel labels start at 1; shift to 0-based raster-scan order
    labels = _kernels.flood_quasi(phi, float(flatness)) - 1
    return QuasiClusterLabeling(labels=labels, flatness=float(flatness))


def export_overlay_pgm(mask: ContourMask | np.ndarray, path) -> None:
    """Curve cells black on a white background, top image row first."""
    arr = mask.cells if isinstance(mask, ContourMask) else mask
    gridio.write_pgm(path, gridio.mask_to_image(arr, on=0, off=255))


def write_segments_csv(contours: ContourSet, path) -> None:
    """All traced segments as `level,x0,y0,x1,y1`, levels in given order,
    segments in trace order."""
    def rows():
        for level in contours.levels:
            for x0, y0, x1, y1 in contours.segments[level]:
                yield (level, float(x0), float(y0), float(x1), float(y1))
    gridio.write_csv(path, SEGMENT_HEADER, rows())
