"""Multi-seed, multi-box experiment runs driven by one declarative spec.

Every (box, seed, fraction) triple is an independent job: deposit disks to
the target fraction, solve the potential, measure the total conductivity,
trace equipotential curves, and estimate their box dimension.  Jobs may
run on any number of workers; results are reduced in a fixed sort order,
so output bytes depend only on the run specification.  Failures of single
jobs are recorded and skipped rather than aborting the run.
"""
from __future__ import annotations

import hashlib
import multiprocessing
import os
from dataclasses import dataclass, field
from typing import NamedTuple

from . import contour, fitting, fractal, gridio, raster, transport
from ._kernels import EXTENSION_ACTIVE
from .geometry import RNG_IDENTITY, BoxSpec, DiskDepositor, SaturationError
from .raster import DEFAULT_SIGMA_INF, DEFAULT_SIGMA_MAT, from_mask
from .solver import NonConvergence, SolverSettings
from .transport import ConductivityCurve, InconsistentFlux, solve_fraction

AGGREGATE_HEADER = "box,N,L,seeds,p_c_avg,p_c_maxmin,t_avg,t_maxmin"
DIM_AGGREGATE_HEADER = "box,N,L,p,D_avg,D_min,D_max,seeds"

_JOB_ERRORS = (SaturationError, NonConvergence, InconsistentFlux,
               fractal.EmptyMask, fractal.InsufficientScales)


def default_p_grid() -> list[float]:
    """Coarse 0.025 steps over [0, 1], refined to 0.005 in [0.55, 0.75]."""
    milli = set(range(0, 1001, 25)) | set(range(550, 751, 5))
    return [v / 1000 for v in sorted(milli)]


def box_label(box: BoxSpec) -> str:
    return f"N{box.lattice_size}_L{box.side_length:g}"


@dataclass(frozen=True)
class RunSpec:
    box_list: list[BoxSpec]
    seeds: list[int]
    p_grid: list[float] = field(default_factory=default_p_grid)
    levels: list[float] = field(default_factory=lambda: list(contour.DEFAULT_LEVELS))
    solver: SolverSettings = field(default_factory=SolverSettings)
    sigma_inf: float = DEFAULT_SIGMA_INF
    output_dir: str = "runs"

    def __post_init__(self):
        if not self.box_list or not self.seeds or not self.p_grid or not self.levels:
            raise ValueError("box_list, seeds, p_grid and levels must be non-empty")
        if any(not 0.0 <= p <= 1.0 for p in self.p_grid):
            raise ValueError("p_grid values must lie in [0, 1]")
        if list(self.p_grid) != sorted(set(self.p_grid)):
            raise ValueError("p_grid must be strictly increasing")


@dataclass(frozen=True)
class JobFailure:
    box: str
    seed: int
    p: float
    error: str
    message: str


@dataclass
class RunReport:
    output_dir: str
    curves: dict
    fits: dict
    dimensions: dict
    failures: list[JobFailure]
    manifest_path: str


class _Job(NamedTuple):
    box_index: int
    box_n: int
    box_len: float
    seed: int
    p: float
    sigma_inf: float
    tolerance: float
    max_iterations: int
    method: str
    preconditioner: str
    sor_omega: float
    levels: tuple
    seed_dir: str
    write_images: bool


class _JobResult(NamedTuple):
    box_index: int
    seed: int
    p: float
    ok: bool
    sigma_total: float
    iterations: int
    residual: float
    dimension: float
    r_squared: float
    error: str
    message: str


def _run_job(job: _Job) -> _JobResult:
    try:
        box = BoxSpec(job.box_len, job.box_n)
        settings = SolverSettings(tolerance=job.tolerance,
                                  max_iterations=job.max_iterations,
                                  method=job.method,
                                  preconditioner=job.preconditioner,
                                  sor_omega=job.sor_omega)
        depositor = DiskDepositor(job.seed, box)
        point, potential = solve_fraction(depositor, job.p, DEFAULT_SIGMA_MAT,
                                          job.sigma_inf, settings)
        contours = contour.extract_levels(potential.phi, job.levels)
        pooled = contour.rasterize_contours(contours)
        dres = fractal.dimension_of_mask(pooled.cells)
        if job.write_images:
            tag = f"p{job.p!r}"
            grid = from_mask(depositor.covered_mask, box, DEFAULT_SIGMA_MAT,
                             job.sigma_inf)
            raster.export_pgm(grid, os.path.join(job.seed_dir, f"{tag}_grid.pgm"))
            gridio.write_pgm(os.path.join(job.seed_dir, f"{tag}_potential.pgm"),
                             gridio.field_to_image(potential.phi))
            contour.export_overlay_pgm(
                pooled, os.path.join(job.seed_dir, f"{tag}_contours.pgm"))
        return _JobResult(job.box_index, job.seed, job.p, True,
                          point.sigma_total, point.iterations, point.residual,
                          dres.dimension, dres.r_squared, "", "")
    except _JOB_ERRORS as exc:
        return _JobResult(job.box_index, job.seed, job.p, False,
                          0.0, 0, 0.0, 0.0, 0.0,
                          type(exc).__name__, str(exc))


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _write_manifest(spec: RunSpec, failures: list[JobFailure], path: str) -> None:
    lines = ["run manifest"]
    lines.append(f"rng {RNG_IDENTITY}")
    lines.append(f"kernel_backend {'extension' if EXTENSION_ACTIVE else 'fallback'}")
    lines.append("boxes " + " ".join(box_label(b) for b in spec.box_list))
    lines.append("seeds " + " ".join(str(s) for s in spec.seeds))
    lines.append("p_grid " + ":".join(repr(float(p)) for p in spec.p_grid))
    lines.append("levels " + ":".join(repr(float(v)) for v in spec.levels))
    lines.append(f"sigma_mat {DEFAULT_SIGMA_MAT!r}")
    lines.append(f"sigma_inf {float(spec.sigma_inf)!r}")
    lines.append(f"tolerance {float(spec.solver.tolerance)!r}")
    lines.append(f"max_iterations {spec.solver.max_iterations}")
    lines.append(f"method {spec.solver.method}")
    lines.append(f"preconditioner {spec.solver.preconditioner}")
    lines.append(f"sor_omega {float(spec.solver.sor_omega)!r}")
    lines.append(f"failures {len(failures)}")
    for f in failures:
        lines.append(f"failed {f.box} {f.seed} {f.p!r} {f.error}: {f.message}")
    out = spec.output_dir
    paths = []
    for root, _, names in os.walk(out):
        for name in names:
            full = os.path.join(root, name)
            if os.path.abspath(full) == os.path.abspath(path):
                continue
            paths.append(os.path.relpath(full, out))
    paths.sort()
    lines.append(f"files {len(paths)}")
    for rel in paths:
        lines.append(f"sha256 {_sha256(os.path.join(out, rel))} {rel}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def run(spec: RunSpec, workers: int = 1, write_images: bool = True) -> RunReport:
    """Execute the full sweep described by `spec`.

    `workers` only sets the process count; outputs are byte-identical for
    any value.  Per-seed curve, fit, and dimension CSVs plus per-fraction
    images land in `<out>/<box>/<seed>/`; box-level aggregates and a
    manifest with content hashes land in `<out>/`.
    """
    out = spec.output_dir
    os.makedirs(out, exist_ok=True)
    levels = tuple(float(v) for v in spec.levels)
    jobs = []
    for bi, box in enumerate(spec.box_list):
        for seed in spec.seeds:
            seed_dir = os.path.join(out, box_label(box), str(seed))
            os.makedirs(seed_dir, exist_ok=True)
            for p in spec.p_grid:
                jobs.append(_Job(bi, box.lattice_size, box.side_length,
                                 seed, float(p), float(spec.sigma_inf),
                                 spec.solver.tolerance,
                                 spec.solver.max_iterations,
                                 spec.solver.method,
                                 spec.solver.preconditioner,
                                 spec.solver.sor_omega,
                                 levels, seed_dir, write_images))

    if workers > 1:
        with multiprocessing.Pool(workers) as pool:
            results = pool.map(_run_job, jobs, chunksize=1)
    else:
        results = [_run_job(j) for j in jobs]

    by_key: dict[tuple[int, int], list[_JobResult]] = {}
    failures: list[JobFailure] = []
    for res in sorted(results, key=lambda r: (r.box_index, r.seed, r.p)):
        if res.ok:
            by_key.setdefault((res.box_index, res.seed), []).append(res)
        else:
            failures.append(JobFailure(box_label(spec.box_list[res.box_index]),
                                       res.seed, res.p, res.error, res.message))

    curves: dict = {}
    fits: dict = {}
    dimensions: dict = {}
    levels_label = fractal.format_levels(levels)
    for bi, box in enumerate(spec.box_list):
        label = box_label(box)
        for seed in spec.seeds:
            rows = by_key.get((bi, seed), [])
            if not rows:
                continue
            seed_dir = os.path.join(out, label, str(seed))
            points = [transport.CurvePoint(r.p, r.sigma_total, r.iterations,
                                           r.residual) for r in rows]
            curve = ConductivityCurve(points=points, seed=seed, box=box,
                                      sigma_mat=DEFAULT_SIGMA_MAT,
                                      sigma_inf=float(spec.sigma_inf))
            curves[(label, seed)] = curve
            transport.write_curve_csv(curve, os.path.join(seed_dir, "curve.csv"))
            dcurve = fractal.DimensionCurve(
                points=[fractal.DimensionPoint(r.p, r.dimension, r.r_squared)
                        for r in rows],
                seed=seed, box=box, levels_label=levels_label)
            dimensions[(label, seed)] = dcurve
            fractal.write_dimension_csv(dcurve,
                                        os.path.join(seed_dir, "dcurve.csv"))
            try:
                result = fitting.fit(curve.fractions, curve.sigmas,
                                     seed=curve.seed)
            except fitting.DegenerateData as exc:
                failures.append(JobFailure(label, seed, -1.0,
                                           type(exc).__name__, str(exc)))
            else:
                fits[(label, seed)] = result
                fitting.write_fit_csv(os.path.join(seed_dir, "fit.csv"),
                                      [(seed, box.lattice_size, result)])

    agg_rows = []
    for box in spec.box_list:
        label = box_label(box)
        seed_fits = [fits[(label, s)] for s in spec.seeds if (label, s) in fits]
        if not seed_fits:
            continue
        pcs = [f.p_c for f in seed_fits]
        ts = [f.t for f in seed_fits]
        agg_rows.append((label, box.lattice_size, box.side_length,
                         len(seed_fits),
                         sum(pcs) / len(pcs), max(pcs) - min(pcs),
                         sum(ts) / len(ts), max(ts) - min(ts)))
    gridio.write_csv(os.path.join(out, "aggregate.csv"), AGGREGATE_HEADER,
                     agg_rows)

    dim_rows = []
    for bi, box in enumerate(spec.box_list):
        label = box_label(box)
        for p in spec.p_grid:
            values = [r.dimension
                      for s in spec.seeds
                      for r in by_key.get((bi, s), []) if r.p == p]
            if not values:
                continue
            dim_rows.append((label, box.lattice_size, box.side_length,
                             float(p), sum(values) / len(values),
                             min(values), max(values), len(values)))
    gridio.write_csv(os.path.join(out, "aggregate_dimension.csv"),
                     DIM_AGGREGATE_HEADER, dim_rows)

    manifest_path = os.path.join(out, "manifest.txt")
    _write_manifest(spec, failures, manifest_path)
    return RunReport(output_dir=out, curves=curves, fits=fits,
                     dimensions=dimensions, failures=failures,
                     manifest_path=manifest_path)
