"""Total conductivity of solved grids and conductivity-vs-fraction sweeps.

The measured quantity is the net current crossing a horizontal cut under a
unit potential difference, averaged over all cuts, normalized so a grid
made entirely of the conductive phase measures exactly 1.  Current must be
conserved, so the per-cut values agree at the solver tolerance; a larger
spread means the potential field cannot be trusted and is reported as an
error rather than averaged away.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gridio
from .geometry import BoxSpec, DiskDepositor
from .raster import (DEFAULT_SIGMA_INF, DEFAULT_SIGMA_MAT, ConductivityGrid,
                     from_mask)
from .solver import PotentialGrid, SolverSettings, assemble, cut_currents, solve

CURVE_HEADER = "p,sigma_total,iterations,residual,seed,N,L"

#: Allowed relative spread of per-cut currents, in units of the tolerance.
FLUX_SPREAD_FACTOR = 10.0


class InconsistentFlux(RuntimeError):
    """Per-cut currents disagree beyond what the tolerance permits."""


@dataclass(frozen=True)
class CurvePoint:
    p: float
    sigma_total: float
    iterations: int
    residual: float


@dataclass(frozen=True)
class ConductivityCurve:
    points: list[CurvePoint]
    seed: int
    box: BoxSpec
    sigma_mat: float
    sigma_inf: float

    @property
    def fractions(self) -> np.ndarray:
        return np.array([pt.p for pt in self.points])

    @property
    def sigmas(self) -> np.ndarray:
        return np.array([pt.sigma_total for pt in self.points])


def total_conductivity(potential: PotentialGrid, grid: ConductivityGrid,
                       tolerance: float = 1e-8) -> float:
    """Mean cut current scaled to [0, 1]: 1 for the pure conductive phase.

    Raises InconsistentFlux when any cut deviates from the mean by more
    than FLUX_SPREAD_FACTOR * tolerance relative.
    """
    n = grid.sigma.shape[0]
    gy_full = assemble(grid.sigma).gy_full
    currents = cut_currents(potential.phi, gy_full)
    mean_current = float(np.mean(currents))
    worst = float(np.max(np.abs(currents - mean_current)))
    # Each cut current sums n face terms of order sigma_mat, so rounding
    # alone spreads the cuts by about n*eps*sigma_mat even at perfect
    # convergence; the acceptance band adds that floor to the tolerance
    # share so very tight tolerances stay satisfiable in float64.
    noise_floor = n * np.finfo(float).eps * grid.sigma_mat
    limit = FLUX_SPREAD_FACTOR * (tolerance * abs(mean_current) + noise_floor)
    if worst > limit:
        cut = int(np.argmax(np.abs(currents - mean_current)))
        raise InconsistentFlux(
            f"cut {cut} current deviates by {worst:.3e} from mean "
            f"{mean_current:.6e} (limit {limit:.3e})")
    return mean_current * (n - 1) / n / grid.sigma_mat


def solve_fraction(depositor: DiskDepositor, p: float,
                   sigma_mat: float, sigma_inf: float,
                   settings: SolverSettings,
                   initial_guess: np.ndarray | None = None
                   ) -> tuple[CurvePoint, PotentialGrid]:
    """Extend one deposition stream to fraction `p`, solve, and measure."""
    depositor.extend_to(p)
    grid = from_mask(depositor.covered_mask, depositor.box,
                     sigma_mat, sigma_inf)
    potential = solve(grid, settings, initial_guess=initial_guess)
    sigma_total = total_conductivity(potential, grid, settings.tolerance)
    point = CurvePoint(p=p, sigma_total=sigma_total,
                       iterations=potential.iterations,
                       residual=potential.final_residual)
    return point, potential


def sweep_curve(seed: int, box: BoxSpec, p_grid,
                settings: SolverSettings | None = None,
                sigma_mat: float = DEFAULT_SIGMA_MAT,
                sigma_inf: float = DEFAULT_SIGMA_INF,
                warm_start: bool = False) -> ConductivityCurve:
    """Conductivity curve over a grid of target fractions for one seed.

    Fractions are visited in increasing order on a single deposition
    stream, so each configuration is a prefix of the next and the recorded
    `p` is the target fraction the stream was extended past.  With
    `warm_start` each solve reuses the previous potential as its starting
    point (same converged answers, often fewer iterations).
    """
    s = settings if settings is not None else SolverSettings()
    targets = sorted(set(float(p) for p in p_grid))
    if not targets:
        raise ValueError("p_grid must be non-empty")
    depositor = DiskDepositor(seed, box)
    points = []
    previous = None
    for p in targets:
        try:
            point, potential = solve_fraction(
                depositor, p, sigma_mat, sigma_inf, s,
                initial_guess=previous if warm_start else None)
        except RuntimeError as exc:
            exc.args = (f"at p={p!r}: {exc}",)
            raise
        points.append(point)
        previous = potential.phi
    return ConductivityCurve(points=points, seed=seed, box=box,
                             sigma_mat=sigma_mat, sigma_inf=sigma_inf)


def write_curve_csv(curve: ConductivityCurve, path) -> None:
    rows = [(pt.p, pt.sigma_total, pt.iterations, pt.residual,
             curve.seed, curve.box.lattice_size, curve.box.side_length)
            for pt in curve.points]
    gridio.write_csv(path, CURVE_HEADER, rows)


def read_curve_csv(path) -> ConductivityCurve:
    header, rows = gridio.read_csv(path)
    if header != CURVE_HEADER.split(","):
        raise ValueError(f"unexpected curve header {header}")
    if not rows:
        raise ValueError("curve file has no data rows")
    points = [CurvePoint(p=float(r[0]), sigma_total=float(r[1]),
                         iterations=int(r[2]), residual=float(r[3]))
              for r in rows]
    seed = int(rows[0][4])
    box = BoxSpec(float(rows[0][6]), int(rows[0][5]))
    return ConductivityCurve(points=points, seed=seed, box=box,
                             sigma_mat=DEFAULT_SIGMA_MAT,
                             sigma_inf=DEFAULT_SIGMA_INF)
