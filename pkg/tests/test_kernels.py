"""Compiled kernels against the pure NumPy fallback, input by input."""
import os
import subprocess
import sys

import numpy as np
import pytest

from diskperc import _kernels
from diskperc._kernels import _fallback

_core = pytest.importorskip("diskperc._kernels._core")


def random_operator(rng, m, n):
    gx = rng.uniform(0.1, 1.0, (m, n - 1))
    gy = rng.uniform(0.1, 1.0, (m - 1, n))
    gyb = rng.uniform(0.1, 1.0, n)
    gyt = rng.uniform(0.1, 1.0, n)
    diag = np.zeros((m, n))
    diag[:, :-1] += gx
    diag[:, 1:] += gx
    diag[:-1] += gy
    diag[1:] += gy
    diag[0] += gyb
    diag[-1] += gyt
    return gx, gy, gyb, gyt, diag


def test_extension_is_active_by_default():
    assert _kernels.EXTENSION_ACTIVE
    assert bool(_core.EXTENSION)
    assert not bool(_fallback.EXTENSION)


def test_pure_mode_env_switch():
    code = ("import diskperc._kernels as k; "
            "print(int(k.EXTENSION_ACTIVE))")
    env = dict(os.environ, DISKPERC_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "0"


def test_stamp_disk_parity():
    rng = np.random.default_rng(53)
    for _ in range(20):
        n = int(rng.integers(16, 64))
        base = (rng.random((n, n)) < 0.2).astype(np.uint8)
        xc, yc = rng.uniform(-2, n + 2, 2)
        r = rng.uniform(0.5, n / 2)
        a = base.copy()
        b = base.copy()
        added_a = _core.stamp_disk(a, xc, yc, r)
        added_b = _fallback.stamp_disk(b, xc, yc, r)
        assert added_a == added_b
        assert np.array_equal(a, b)


def test_apply_stencil_and_dot_parity():
    rng = np.random.default_rng(59)
    m, n = 14, 16
    gx, gy, gyb, gyt, diag = random_operator(rng, m, n)
    x = rng.random((m, n))
    out_a = np.empty_like(x)
    out_b = np.empty_like(x)
    _core.apply_stencil(x, gx, gy, diag, out_a)
    _fallback.apply_stencil(x, gx, gy, diag, out_b)
    assert np.allclose(out_a, out_b, atol=1e-14)
    assert _core.dot(x, out_a) == pytest.approx(_fallback.dot(x, out_b),
                                                rel=1e-13)


def test_ic0_parity():
    rng = np.random.default_rng(61)
    m, n = 12, 12
    gx, gy, gyb, gyt, diag = random_operator(rng, m, n)
    piv_a = _core.ic0_pivots(gx, gy, diag)
    piv_b = _fallback.ic0_pivots(gx, gy, diag)
    assert np.allclose(piv_a, piv_b, atol=1e-13)
    r = rng.random((m, n))
    out_a = np.empty_like(r)
    out_b = np.empty_like(r)
    _core.ic0_solve(r, gx, gy, piv_a, out_a)
    _fallback.ic0_solve(r, gx, gy, piv_b, out_b)
    assert np.allclose(out_a, out_b, atol=1e-13)


def test_sor_sweep_parity():
    rng = np.random.default_rng(67)
    m, n = 10, 12
    gx, gy, gyb, gyt, diag = random_operator(rng, m, n)
    b = rng.random((m, n))
    phi_a = rng.random((m, n))
    phi_b = phi_a.copy()
    for parity in (0, 1):
        _core.sor_sweep(phi_a, gx, gy, diag, b, 1.7, parity)
        _fallback.sor_sweep(phi_b, gx, gy, diag, b, 1.7, parity)
    assert np.allclose(phi_a, phi_b, atol=1e-14)


def test_march_parity():
    rng = np.random.default_rng(71)
    phi = rng.random((24, 24))
    for level in (0.2, 0.5, 0.8):
        segs_a = _core.march(phi, level)
        segs_b = _fallback.march(phi, level)
        assert np.allclose(np.asarray(segs_a), np.asarray(segs_b),
                           atol=1e-14)


def test_mark_segments_parity():
    rng = np.random.default_rng(73)
    segs = rng.uniform(0, 31, (50, 4))
    a = np.zeros((32, 32), dtype=np.uint8)
    b = np.zeros((32, 32), dtype=np.uint8)
    _core.mark_segments(a, segs)
    _fallback.mark_segments(b, segs)
    assert np.array_equal(a, b)


def test_flood_quasi_parity():
    rng = np.random.default_rng(79)
    phi = np.round(rng.random((30, 30)), 1)
    a = _core.flood_quasi(phi, 0.05)
    b = _fallback.flood_quasi(phi, 0.05)
    assert np.array_equal(np.asarray(a), np.asarray(b))


def test_benchmark_smoke(capsys):
    from diskperc import benchmark
    assert benchmark.main(["--size", "64", "--repeat", "1"]) == 0
    out = capsys.readouterr().out
    for name in ("stamp_disk", "ic0_solve", "march", "flood_quasi"):
        assert name in out


def test_solver_results_identical_across_backends():
    # end to end: a full solve in a pure-mode subprocess must match the
    # compiled path bit for bit
    script = (
        "import numpy as np\n"
        "from diskperc.geometry import BoxSpec, deposit_until\n"
        "from diskperc.raster import rasterize\n"
        "from diskperc.solver import SolverSettings, solve\n"
        "config = deposit_until(0.55, seed=12, box=BoxSpec(2.56, 64))\n"
        "pot = solve(rasterize(config), SolverSettings())\n"
        "print(repr(float(pot.phi.sum())))\n")
    runs = {}
    for mode in ("0", "1"):
        env = dict(os.environ, DISKPERC_PURE=mode)
        out = subprocess.run([sys.executable, "-c", script], env=env,
                             capture_output=True, text=True, check=True)
        runs[mode] = out.stdout.strip()
    assert runs["0"] == runs["1"]
