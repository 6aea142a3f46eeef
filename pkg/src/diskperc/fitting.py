"""Threshold power-law fits of conductivity curves.

The model is zero below a threshold fraction p_c and grows as
((p - p_c)/(1 - p_c))**t above it, so it equals 1 at full coverage.  Both
parameters are found by exhaustive grid search on the sum of squared
errors, followed by three local refinements; ties prefer the smallest
threshold, then the smallest exponent.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gridio

FIT_HEADER = "seed,N,p_c,t,sse,points"

_PC_COARSE = np.linspace(0.05, 0.95, 181)    # step 0.005
_T_COARSE = np.linspace(0.2, 5.0, 481)       # step 0.01
_REFINEMENTS = 3
_REFINE_POINTS = 21


class DegenerateData(ValueError):
    """Not enough structure in the curve to constrain the fit."""


@dataclass(frozen=True)
class FitResult:
    p_c: float
    t: float
    sse: float
    points: int
    seed: int | None = None


def model(p, p_c: float, t: float):
    """Piecewise power law; accepts scalars or arrays, vanishes at p <= p_c."""
    p = np.asarray(p, dtype=float)
    base = np.clip((p - p_c) / (1.0 - p_c), 0.0, None)
    out = base**t
    return float(out) if out.ndim == 0 else out


def _search(p: np.ndarray, s: np.ndarray, pc_grid: np.ndarray,
            t_grid: np.ndarray) -> tuple[float, float, float]:
    best_sse = np.inf
    best_pc = pc_grid[0]
    best_t = t_grid[0]
    tcol = t_grid[:, None]
    for pc in pc_grid:
        base = np.clip((p - pc) / (1.0 - pc), 0.0, None)
        sse = np.sum((base[None, :]**tcol - s[None, :])**2, axis=1)
        k = int(np.argmin(sse))
        if sse[k] < best_sse:
            best_sse = float(sse[k])
            best_pc = float(pc)
            best_t = float(t_grid[k])
    return best_pc, best_t, best_sse


def fit(fractions, sigmas, seed: int | None = None) -> FitResult:
    """Fit the threshold power law to a conductivity curve.

    Raises DegenerateData when fewer than 4 distinct fractions are given
    or the conductivities carry no variation.
    """
    p = np.asarray(fractions, dtype=float)
    s = np.asarray(sigmas, dtype=float)
    if p.shape != s.shape or p.ndim != 1:
        raise ValueError("fractions and sigmas must be 1-D and equal length")
    if np.unique(p).size < 4:
        raise DegenerateData("need at least 4 distinct fractions")
    if float(np.max(s) - np.min(s)) < 1e-12:
        raise DegenerateData("conductivities show no variation")

    order = np.argsort(p, kind="stable")
    p = p[order]
    s = s[order]
    pc, t, sse = _search(p, s, _PC_COARSE, _T_COARSE)
    pc_half = float(_PC_COARSE[1] - _PC_COARSE[0])
    t_half = float(_T_COARSE[1] - _T_COARSE[0])
    for _ in range(_REFINEMENTS):
        # refined grids stay inside the coarse search domain
        pc_grid = np.clip(np.linspace(pc - pc_half, pc + pc_half,
                                      _REFINE_POINTS),
                          _PC_COARSE[0], _PC_COARSE[-1])
        t_grid = np.clip(np.linspace(t - t_half, t + t_half,
                                     _REFINE_POINTS),
                         _T_COARSE[0], _T_COARSE[-1])
        pc, t, sse = _search(p, s, pc_grid, t_grid)
        pc_half /= 10.0
        t_half /= 10.0
    return FitResult(p_c=pc, t=t, sse=sse, points=int(p.size), seed=seed)


def write_fit_csv(path, entries) -> None:
    """Write rows of (seed, lattice_size, FitResult)."""
    rows = [(seed, n, r.p_c, r.t, r.sse, r.points) for seed, n, r in entries]
    gridio.write_csv(path, FIT_HEADER, rows)
