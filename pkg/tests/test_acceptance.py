"""Acceptance suite: one test per shipping criterion.

Run with `pytest -v tests/test_acceptance.py` to get one pass/fail line
per criterion.  Criteria 5 and 7 depend on a complete desk-scale
experiment (N=256, 6 seeds); the session-scoped fixtures in conftest.py
build those runs once and share them with the determinism check.
"""
import os
import time

import numpy as np
import pytest

from diskperc import fitting, fractal, pipeline, transport
from diskperc.fitting import fit, model
from diskperc.fractal import (dimension_of_mask, koch_mask, pad_to_pow2,
                              sierpinski_mask)
from diskperc.geometry import BoxSpec, DiskDepositor
from diskperc.raster import from_mask
from diskperc.solver import SolverSettings, assemble, cut_currents, \
    dense_reference, solve
from diskperc.transport import solve_fraction, total_conductivity

from conftest import DESK_BOX, DESK_SEEDS

DESK_LABEL = pipeline.box_label(DESK_BOX)


def test_criterion_01_homogeneous_solver_exactness():
    n = 256
    grid = from_mask(np.ones((n, n), dtype=bool), BoxSpec(10.24, n))
    t0 = time.perf_counter()
    pot = solve(grid)
    sigma = total_conductivity(pot, grid)
    elapsed = time.perf_counter() - t0
    expected = np.repeat(np.linspace(0.0, 1.0, n)[:, None], n, axis=1)
    assert np.max(np.abs(pot.phi - expected)) <= 1e-8
    assert abs(sigma - 1.0) <= 1e-6
    assert elapsed < 5.0


def test_criterion_02_iterative_matches_dense_oracle():
    rng = np.random.default_rng(90125)
    t0 = time.perf_counter()
    for n in (8, 16):
        for _ in range(25):
            mask = rng.random((n, n)) < rng.uniform(0.2, 0.9)
            grid = from_mask(mask, BoxSpec(float(n), n))
            iterative = solve(grid, SolverSettings(tolerance=1e-12))
            direct = dense_reference(grid)
            assert np.max(np.abs(iterative.phi - direct.phi)) <= 1e-8
    assert time.perf_counter() - t0 < 10.0


def test_criterion_03_analytic_composites():
    n = 256
    s1, s2 = 1.0, 1e-4
    box = BoxSpec(float(n), n)

    series = np.zeros((n, n), dtype=bool)
    series[:n // 2] = True
    grid = from_mask(series, box, sigma_mat=s1, sigma_inf=s2)
    sigma = total_conductivity(solve(grid, SolverSettings(tolerance=1e-10)),
                               grid, 1e-10)
    assert sigma == pytest.approx(2.0 * s1 * s2 / (s1 + s2), rel=5e-3)

    parallel = np.zeros((n, n), dtype=bool)
    parallel[:, :n // 2] = True
    grid = from_mask(parallel, box, sigma_mat=s1, sigma_inf=s2)
    sigma = total_conductivity(solve(grid, SolverSettings(tolerance=1e-10)),
                               grid, 1e-10)
    assert sigma == pytest.approx((s1 + s2) / 2.0, rel=5e-3)


def test_criterion_04_fit_round_trip():
    p = np.linspace(0.0, 1.0, 21)
    s = model(p, 0.6763, 1.3333)
    t0 = time.perf_counter()
    result = fit(p, s)
    elapsed = time.perf_counter() - t0
    assert abs(result.p_c - 0.6763) <= 1e-3
    assert abs(result.t - 1.3333) <= 1e-2
    assert elapsed < 1.0


def test_criterion_05_desk_scale_percolation_physics(desk_run):
    report = desk_run.report
    assert report.failures == []
    fits = [report.fits[(DESK_LABEL, s)] for s in DESK_SEEDS]
    lines = [f"seed {f.seed}: p_c={f.p_c:.4f} t={f.t:.4f}" for f in fits]
    avg = sum(f.p_c for f in fits) / len(fits)
    lines.append(f"average p_c={avg:.4f}")
    detail = "\n".join(lines)
    for f in fits:
        assert 0.58 <= f.p_c <= 0.76, \
            f"seed {f.seed} p_c={f.p_c:.4f} outside [0.58, 0.76]\n{detail}"
        assert 0.8 <= f.t <= 2.2, \
            f"seed {f.seed} t={f.t:.4f} outside [0.8, 2.2]\n{detail}"
    assert abs(avg - 0.67) <= 0.04, \
        f"average p_c={avg:.4f} outside 0.67 +/- 0.04\n{detail}"
    assert desk_run.elapsed < 1800.0


def test_criterion_06_fractal_calibration():
    koch = dimension_of_mask(pad_to_pow2(koch_mask(order=5, size=1024)))
    assert abs(koch.dimension - 1.262) <= 0.05

    carpet = dimension_of_mask(pad_to_pow2(sierpinski_mask(order=5)))
    assert abs(carpet.dimension - 1.893) <= 0.05

    line = np.zeros((256, 256), dtype=np.uint8)
    line[128, :] = 1
    assert abs(dimension_of_mask(line).dimension - 1.0) <= 0.02

    square = np.ones((256, 256), dtype=np.uint8)
    assert abs(dimension_of_mask(square).dimension - 2.0) <= 0.02


def test_criterion_07_dimension_curve_shape(desk_run):
    report = desk_run.report
    problems = []
    for seed in DESK_SEEDS:
        curve = report.dimensions[(DESK_LABEL, seed)]
        by_p = {pt.p: pt.dimension for pt in curve.points}
        if by_p[0.05] > 1.05:
            problems.append(f"seed {seed}: D(0.05)={by_p[0.05]:.3f} > 1.05")
        if by_p[1.0] > 1.02:
            problems.append(f"seed {seed}: D(1.0)={by_p[1.0]:.3f} > 1.02")
        dims = np.array([pt.dimension for pt in curve.points])
        ps = np.array([pt.p for pt in curve.points])
        peak_d = float(dims.max())
        top = np.flatnonzero(dims == dims.max())
        # adjacent targets can share one configuration, so the maximum may
        # sit on a plateau; only separated maxima are competing peaks
        if np.any(np.diff(top) != 1):
            problems.append(f"seed {seed}: multiple separated peaks")
        p_c = report.fits[(DESK_LABEL, seed)].p_c
        offset = float(np.min(np.abs(ps[top] - p_c)))
        lo, hi = float(ps[top[0]]), float(ps[top[-1]])
        if offset > 0.05:
            problems.append(f"seed {seed}: peak at p=[{lo:.3f},{hi:.3f}] vs "
                            f"p_c={p_c:.4f} (offset {offset:.3f} > 0.05)")
        if not 1.10 <= peak_d <= 1.35:
            problems.append(f"seed {seed}: peak D={peak_d:.3f} "
                            f"outside [1.10, 1.35]")
    assert not problems, "D(p) shape violations:\n" + "\n".join(problems)


@pytest.mark.skipif(os.environ.get("RUN_FULL_SCALE") != "1",
                    reason="multi-hour full-scale run; set RUN_FULL_SCALE=1")
def test_criterion_08_full_scale_reproduction(tmp_path):
    box = BoxSpec(side_length=40.96, lattice_size=1024)
    spec = pipeline.RunSpec(box_list=[box], seeds=list(DESK_SEEDS),
                            output_dir=str(tmp_path / "full"))
    report = pipeline.run(spec, workers=max(os.cpu_count() or 1, 1),
                          write_images=False)
    label = pipeline.box_label(box)
    fits = [report.fits[(label, s)] for s in DESK_SEEDS]
    avg_pc = sum(f.p_c for f in fits) / len(fits)
    avg_t = sum(f.t for f in fits) / len(fits)
    assert abs(avg_pc - 0.669) <= 0.02
    assert abs(avg_t - 1.23) <= 0.15


def test_criterion_09_determinism_across_worker_counts(desk_run,
                                                       desk_run_twin):
    def csv_bytes(root):
        out = {}
        for base, _, names in os.walk(root):
            for name in names:
                if name.endswith(".csv"):
                    full = os.path.join(base, name)
                    with open(full, "rb") as fh:
                        out[os.path.relpath(full, root)] = fh.read()
        return out

    a = csv_bytes(desk_run.out)
    b = csv_bytes(desk_run_twin.out)
    assert set(a) == set(b)
    mismatched = [rel for rel in a if a[rel] != b[rel]]
    assert not mismatched, f"CSV outputs differ: {mismatched}"


def test_criterion_10_conservation_properties(desk_run):
    rng = np.random.default_rng(777)
    for _ in range(20):
        seed = int(rng.integers(1, 10**6))
        p = float(rng.uniform(0.3, 0.9))
        depositor = DiskDepositor(seed, DESK_BOX)
        point, pot = solve_fraction(depositor, p, 1.0, 1e-4,
                                    SolverSettings())
        grid = from_mask(depositor.covered_mask, DESK_BOX, 1.0, 1e-4)
        currents = cut_currents(pot.phi, assemble(grid.sigma).gy_full)
        mean = float(np.mean(currents))
        worst = float(np.max(np.abs(currents - mean)))
        assert worst <= 10.0 * 1e-8 * abs(mean), \
            f"seed {seed} p={p:.3f}: cut spread {worst:.3e} vs mean {mean:.3e}"
        assert pot.phi.min() >= 0.0 and pot.phi.max() <= 1.0

    report = desk_run.report
    for seed in DESK_SEEDS:
        sigmas = report.curves[(DESK_LABEL, seed)].sigmas
        assert np.all(np.diff(sigmas) >= 0.0), \
            f"seed {seed}: sigma(p) not monotone non-decreasing"
