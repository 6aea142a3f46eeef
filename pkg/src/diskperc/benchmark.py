"""Timing comparison between the compiled kernels and the pure fallback.

Run as `python -m diskperc.benchmark [--size N] [--repeat K]`.  Each hot
kernel is timed against both implementations on identical inputs, and the
outputs are cross-checked so a speed win can never hide a semantic drift.
"""
from __future__ import annotations

import argparse
import os
import time

import numpy as np

from ._kernels import _fallback
from .geometry import BoxSpec, DiskDepositor
from .raster import from_mask
from .solver import SolverSettings, assemble, linear_ramp, solve

try:
    from ._kernels import _core
except ImportError:
    _core = None


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _report(name: str, fast: float, slow: float) -> None:
    ratio = slow / fast if fast > 0 else float("inf")
    print(f"{name:<16} extension {fast * 1e3:9.3f} ms   "
          f"fallback {slow * 1e3:9.3f} ms   speedup {ratio:6.1f}x")


def run_benchmark(size: int = 256, repeat: int = 3) -> None:
    if _core is None:
        print("compiled extension not available; nothing to compare")
        return
    box = BoxSpec(size / 25.0, size)
    dep = DiskDepositor(seed=1, box=box)
    dep.extend_to(0.66)
    grid = from_mask(dep.covered_mask, box)
    op = assemble(grid.sigma)
    x = linear_ramp(size)
    out_a = np.empty_like(x)
    out_b = np.empty_like(x)

    print(f"grid {size}x{size}, fraction {dep.fraction:.4f}")

    mask_a = np.zeros((size, size), dtype=np.uint8)
    mask_b = np.zeros((size, size), dtype=np.uint8)
    disks = dep.disks
    h = box.spacing

    def stamp(mod, mask):
        mask[:] = 0
        total = 0
        for d in disks:
            total += mod.stamp_disk(mask, d.center_x / h, d.center_y / h,
                                    d.radius / h)
        return total

    ta = _time(lambda: stamp(_core, mask_a), repeat)
    tb = _time(lambda: stamp(_fallback, mask_b), repeat)
    assert np.array_equal(mask_a, mask_b)
    _report("stamp_disk", ta, tb)

    ta = _time(lambda: [_core.apply_stencil(x, op.gx, op.gy, op.diag, out_a)
                        for _ in range(50)], repeat)
    tb = _time(lambda: [_fallback.apply_stencil(x, op.gx, op.gy, op.diag, out_b)
                        for _ in range(50)], repeat)
    assert np.allclose(out_a, out_b, rtol=1e-13, atol=1e-15)
    _report("apply_stencil", ta, tb)

    piv_a = _core.ic0_pivots(op.gx, op.gy, op.diag)
    piv_b = _fallback.ic0_pivots(op.gx, op.gy, op.diag)
    assert np.allclose(piv_a, piv_b, rtol=1e-12)
    r = np.random.default_rng(7).random(x.shape)
    ta = _time(lambda: [_core.ic0_solve(r, op.gx, op.gy, piv_a, out_a)
                        for _ in range(20)], repeat)
    tb = _time(lambda: [_fallback.ic0_solve(r, op.gx, op.gy, piv_b, out_b)
                        for _ in range(20)], repeat)
    assert np.allclose(out_a, out_b, rtol=1e-12, atol=1e-15)
    _report("ic0_solve", ta, tb)

    phi_a = x.copy()
    phi_b = x.copy()

    def sweeps(mod, phi):
        for _ in range(20):
            mod.sor_sweep(phi, op.gx, op.gy, op.diag, op.b, 1.9, 0)
            mod.sor_sweep(phi, op.gx, op.gy, op.diag, op.b, 1.9, 1)

    ta = _time(lambda: sweeps(_core, phi_a), repeat)
    tb = _time(lambda: sweeps(_fallback, phi_b), repeat)
    assert np.allclose(phi_a, phi_b, rtol=1e-10, atol=1e-13)
    _report("sor_sweep", ta, tb)

    full = solve(grid).phi
    seg_a = _core.march(full, 0.5)
    seg_b = _fallback.march(full, 0.5)
    assert np.allclose(seg_a, seg_b, rtol=1e-13, atol=1e-15)
    ta = _time(lambda: [_core.march(full, lv / 10) for lv in range(1, 10)],
               repeat)
    tb = _time(lambda: [_fallback.march(full, lv / 10) for lv in range(1, 10)],
               repeat)
    _report("march", ta, tb)

    mask_a[:] = 0
    mask_b[:] = 0
    ta = _time(lambda: _core.mark_segments(mask_a, seg_a), repeat)
    tb = _time(lambda: _fallback.mark_segments(mask_b, seg_b), repeat)
    assert np.array_equal(mask_a, mask_b)
    _report("mark_segments", ta, tb)

    lab_a = _core.flood_quasi(full, 0.0125)
    lab_b = _fallback.flood_quasi(full, 0.0125)
    assert np.array_equal(lab_a, lab_b)
    ta = _time(lambda: _core.flood_quasi(full, 0.0125), repeat)
    tb = _time(lambda: _fallback.flood_quasi(full, 0.0125), repeat)
    _report("flood_quasi", ta, tb)

    settings = SolverSettings()
    ta = _time(lambda: solve(grid, settings), 1)
    print(f"end-to-end solve (active backend: "
          f"{'extension' if os.environ.get('DISKPERC_PURE') != '1' else 'fallback'})"
          f" {ta:.3f} s, {solve(grid, settings).iterations} iterations")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="compare compiled and pure kernel timings")
    parser.add_argument("--size", type=int, default=256)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    run_benchmark(size=args.size, repeat=args.repeat)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
