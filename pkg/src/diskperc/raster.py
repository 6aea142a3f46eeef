"""Binary conductivity fields on the box lattice.

A cell is conductive when its center lies inside at least one disk; the
two-phase field takes the value ``sigma_mat`` there and ``sigma_inf``
elsewhere (a small but finite background so the linear system stays
non-singular below the connectivity threshold).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry, gridio

DEFAULT_SIGMA_MAT = 1.0
DEFAULT_SIGMA_INF = 1e-4


@dataclass(frozen=True)
class ConductivityGrid:
    """Per-cell conductivity with its generating mask and phase values."""

    sigma: np.ndarray
    mask: np.ndarray
    sigma_mat: float
    sigma_inf: float
    box: geometry.BoxSpec

    @property
    def fraction(self) -> float:
        return float(np.count_nonzero(self.mask)) / self.mask.size

    @property
    def contrast(self) -> float:
        return self.sigma_inf / self.sigma_mat


def from_mask(mask: np.ndarray, box: geometry.BoxSpec,
              sigma_mat: float = DEFAULT_SIGMA_MAT,
              sigma_inf: float = DEFAULT_SIGMA_INF) -> ConductivityGrid:
    if not 0.0 < sigma_inf < sigma_mat:
        raise ValueError("need 0 < sigma_inf < sigma_mat")
    sigma = np.where(mask != 0, sigma_mat, sigma_inf)
    return ConductivityGrid(sigma=sigma, mask=mask.astype(np.uint8),
                            sigma_mat=sigma_mat, sigma_inf=sigma_inf, box=box)


def rasterize(config: geometry.Configuration,
              sigma_mat: float = DEFAULT_SIGMA_MAT,
              sigma_inf: float = DEFAULT_SIGMA_INF) -> ConductivityGrid:
    """Two-phase conductivity field of a disk configuration on its own
    lattice (cell-center membership, matching the deposition measure)."""
    mask = geometry.coverage_mask(config)
    return from_mask(mask, config.box, sigma_mat, sigma_inf)


def export_pgm(grid: ConductivityGrid, path) -> None:
    """Conductive cells white (255) on black background, top row first."""
    gridio.write_pgm(path, gridio.mask_to_image(grid.mask))
