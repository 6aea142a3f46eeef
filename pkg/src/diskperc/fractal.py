"""Box-counting fractal dimension of binary masks.

Occupied boxes are counted over power-of-two box sizes from 1 up to an
eighth of the grid side.  Two filters decide which scales carry geometric
information: a size is ceiling-saturated when its count is within a
factor of two of the available boxes (the slope would bend toward 2),
and it is a pixel recount when its count is within a factor of four of
the occupied-cell count (the boxes merely re-tile the marked cells).
The slope is fitted over the four smallest sizes passing both filters;
when fewer than four pass both, the fallback prefers the four smallest
passing the ceiling filter (thin sets on small grids), then the four
smallest passing the pixel filter (dense sets that saturate the ceiling
everywhere, such as a carpet or a filled block), then whatever survives.
Known self-similar sets serve as calibration targets for the rule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels, contour, gridio
from .geometry import BoxSpec, DiskDepositor
from .raster import DEFAULT_SIGMA_INF, DEFAULT_SIGMA_MAT
from .solver import SolverSettings
from .transport import solve_fraction

DIMENSION_HEADER = "p,D,r_squared,seed,N,levels"

KOCH_DIMENSION = math.log(4.0) / math.log(3.0)
SIERPINSKI_DIMENSION = math.log(8.0) / math.log(3.0)

_MIN_SCALES = 4


class EmptyMask(ValueError):
    """The mask holds no marked cells, so no dimension exists."""


class InsufficientScales(ValueError):
    """Too few box sizes for a meaningful slope."""


@dataclass(frozen=True)
class BoxCountSeries:
    box_sizes: tuple[int, ...]
    counts: tuple[int, ...]
    grid_n: int


@dataclass(frozen=True)
class FractalResult:
    dimension: float
    fit_intercept: float
    r_squared: float
    sizes_used: tuple[int, ...]


@dataclass(frozen=True)
class DimensionPoint:
    p: float
    dimension: float
    r_squared: float


@dataclass(frozen=True)
class DimensionCurve:
    points: list[DimensionPoint]
    seed: int
    box: BoxSpec
    levels_label: str


def default_sizes(n: int) -> list[int]:
    """Power-of-two box sizes from 1 to n/8."""
    sizes = []
    s = 1
    while s <= n // 8:
        sizes.append(s)
        s *= 2
    return sizes


def box_count(mask, sizes=None) -> BoxCountSeries:
    """Count size x size tiles containing at least one marked cell.

    Accepts a plain 2-D array or an object with a `cells` array attribute
    (a pooled contour mask).
    """
    m = np.asarray(getattr(mask, "cells", mask)) != 0
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("mask must be square")
    if not m.any():
        raise EmptyMask("mask has no marked cells")
    chosen = default_sizes(n) if sizes is None else sorted(int(s) for s in sizes)
    if not chosen:
        raise InsufficientScales("no box sizes available")
    counts = []
    for s in chosen:
        if s < 1 or n % s != 0:
            raise ValueError(f"box size {s} does not divide side {n}")
        blocks = m.reshape(n // s, s, n // s, s)
        counts.append(int(blocks.any(axis=(1, 3)).sum()))
    return BoxCountSeries(box_sizes=tuple(chosen), counts=tuple(counts),
                          grid_n=n)


def dimension(series: BoxCountSeries) -> FractalResult:
    """Least-squares slope of log(count) against log(1/size).

    Saturated scales are excluded first; see the module docstring for the
    exclusion and fallback rules.  Raises InsufficientScales when the
    series itself has fewer than four sizes.
    """
    sizes = np.array(series.box_sizes, dtype=float)
    counts = np.array(series.counts, dtype=float)
    if sizes.size < _MIN_SCALES:
        raise InsufficientScales(
            f"series has {sizes.size} sizes, need {_MIN_SCALES}")
    n = series.grid_n
    capacity = (n // sizes.astype(int)).astype(float)**2
    # counts[0] is the occupied-cell total when sizes start at 1
    reference = counts[0]
    unsaturated = 2.0 * counts <= capacity
    coarse_enough = 4.0 * counts <= reference
    pools = [unsaturated & coarse_enough, unsaturated, coarse_enough]
    pool = next((np.flatnonzero(c) for c in pools
                 if int(c.sum()) >= _MIN_SCALES), None)
    if pool is None:
        # nothing yields four clean scales; take the largest pool, or
        # every size when both filters reject nearly everything
        best = max(pools, key=lambda c: int(c.sum()))
        pool = np.flatnonzero(best) if int(best.sum()) >= 2 \
            else np.arange(sizes.size)
    keep = np.zeros(sizes.size, dtype=bool)
    keep[pool[:_MIN_SCALES]] = True
    x = np.log(1.0 / sizes[keep])
    y = np.log(counts[keep])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted)**2))
    ss_tot = float(np.sum((y - np.mean(y))**2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return FractalResult(dimension=float(slope), fit_intercept=float(intercept),
                         r_squared=r_squared,
                         sizes_used=tuple(int(s) for s in sizes[keep]))


def dimension_of_mask(mask: np.ndarray, sizes=None) -> FractalResult:
    return dimension(box_count(mask, sizes))


def dimension_of_field(phi: np.ndarray, levels=contour.DEFAULT_LEVELS
                       ) -> FractalResult:
    """Dimension of the pooled equipotential curves of a potential field."""
    contours = contour.extract_levels(phi, levels)
    pooled = contour.rasterize_contours(contours)
    return dimension_of_mask(pooled.cells)


def dimension_curve(seed: int, box: BoxSpec, p_grid,
                    levels=contour.DEFAULT_LEVELS,
                    settings: SolverSettings | None = None,
                    sigma_mat: float = DEFAULT_SIGMA_MAT,
                    sigma_inf: float = DEFAULT_SIGMA_INF,
                    levels_label: str | None = None,
                    warm_start: bool = False) -> DimensionCurve:
    """Pooled-contour dimension at each target fraction for one seed."""
    s = settings if settings is not None else SolverSettings()
    targets = sorted(set(float(p) for p in p_grid))
    label = levels_label if levels_label is not None else format_levels(levels)
    depositor = DiskDepositor(seed, box)
    points = []
    previous = None
    for p in targets:
        try:
            _, potential = solve_fraction(
                depositor, p, sigma_mat, sigma_inf, s,
                initial_guess=previous if warm_start else None)
        except RuntimeError as exc:
            exc.args = (f"at p={p!r}: {exc}",)
            raise
        result = dimension_of_field(potential.phi, levels)
        points.append(DimensionPoint(p=p, dimension=result.dimension,
                                     r_squared=result.r_squared))
        previous = potential.phi
    return DimensionCurve(points=points, seed=seed, box=box,
                          levels_label=label)


def format_levels(levels) -> str:
    """Colon-joined level list used in CSV cells (commas stay separators)."""
    return ":".join(repr(float(v)) for v in levels)


def write_dimension_csv(curve: DimensionCurve, path) -> None:
    rows = [(pt.p, pt.dimension, pt.r_squared, curve.seed,
             curve.box.lattice_size, curve.levels_label)
            for pt in curve.points]
    gridio.write_csv(path, DIMENSION_HEADER, rows)


def pad_to_pow2(mask: np.ndarray) -> np.ndarray:
    """Zero-pad a square mask up to the next power-of-two side."""
    n = mask.shape[0]
    size = 1
    while size < n:
        size *= 2
    if size == n:
        return mask
    out = np.zeros((size, size), dtype=mask.dtype)
    out[:n, :n] = mask
    return out


def koch_mask(order: int = 5, size: int = 1024) -> np.ndarray:
    """Triadic bump curve of the given order rasterized on a size^2 grid."""
    pts = np.array([0.0 + 0.0j, 1.0 + 0.0j])
    rot = np.exp(1j * math.pi / 3.0)
    for _ in range(order):
        a = pts[:-1]
        b = pts[1:]
        d = (b - a) / 3.0
        chunk = np.empty((a.size, 4), dtype=complex)
        chunk[:, 0] = a
        chunk[:, 1] = a + d
        chunk[:, 2] = a + d + d * rot
        chunk[:, 3] = a + 2.0 * d
        pts = np.append(chunk.ravel(), b[-1])
    margin = 0.02 * size
    scale = size - 1 - 2 * margin
    x = margin + pts.real * scale
    y = margin + (pts.imag + 0.05) * scale
    segs = np.column_stack([x[:-1], y[:-1], x[1:], y[1:]])
    mask = np.zeros((size, size), dtype=np.uint8)
    _kernels.mark_segments(mask, np.ascontiguousarray(segs))
    return mask


def sierpinski_mask(order: int = 5) -> np.ndarray:
    """Square carpet with recursively removed centers, side 3**order,
    zero-padded to the next power of two."""
    cell = np.ones((3, 3), dtype=np.uint8)
    cell[1, 1] = 0
    mask = np.ones((1, 1), dtype=np.uint8)
    for _ in range(order):
        mask = np.kron(mask, cell)
    return pad_to_pow2(mask)
