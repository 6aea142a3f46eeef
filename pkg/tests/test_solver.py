"""Potential solves against analytic and dense-direct oracles."""
import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from diskperc.geometry import BoxSpec
from diskperc.raster import from_mask
from diskperc.solver import (NonConvergence, SolverSettings, assemble,
                             dense_reference, face_conductance, linear_ramp,
                             solve)


def uniform_grid(n: int, value: bool = True):
    mask = np.full((n, n), value, dtype=bool)
    return from_mask(mask, BoxSpec(float(n), n))


def random_grid(rng, n: int, fill: float = 0.5):
    mask = rng.random((n, n)) < fill
    return from_mask(mask, BoxSpec(float(n), n))


def test_uniform_conductor_gives_linear_profile():
    grid = uniform_grid(256)
    pot = solve(grid)
    expected = np.repeat(np.linspace(0.0, 1.0, 256)[:, None], 256, axis=1)
    assert np.max(np.abs(pot.phi - expected)) <= 1e-8


def test_uniform_insulator_gives_same_profile():
    grid = uniform_grid(64, value=False)
    pot = solve(grid)
    expected = np.repeat(np.linspace(0.0, 1.0, 64)[:, None], 64, axis=1)
    assert np.max(np.abs(pot.phi - expected)) <= 1e-8


def test_pinned_rows_and_bounds():
    rng = np.random.default_rng(4)
    pot = solve(random_grid(rng, 32))
    assert np.all(pot.phi[0] == 0.0)
    assert np.all(pot.phi[-1] == 1.0)
    assert pot.phi.min() >= 0.0 and pot.phi.max() <= 1.0


def test_iterative_matches_dense_reference():
    rng = np.random.default_rng(11)
    for n in (8, 16):
        for _ in range(10):
            grid = random_grid(rng, n)
            iterative = solve(grid, SolverSettings(tolerance=1e-12))
            direct = dense_reference(grid)
            assert np.max(np.abs(iterative.phi - direct.phi)) <= 1e-8


def test_sor_matches_pcg():
    rng = np.random.default_rng(17)
    grid = random_grid(rng, 16)
    a = solve(grid, SolverSettings(tolerance=1e-11, method="pcg"))
    b = solve(grid, SolverSettings(tolerance=1e-11, method="sor",
                                   max_iterations=10**7))
    assert np.max(np.abs(a.phi - b.phi)) <= 1e-7


def test_ic0_preconditioner_matches_jacobi():
    rng = np.random.default_rng(23)
    grid = random_grid(rng, 32)
    a = solve(grid, SolverSettings(tolerance=1e-12, preconditioner="jacobi"))
    b = solve(grid, SolverSettings(tolerance=1e-12, preconditioner="ic0"))
    assert np.max(np.abs(a.phi - b.phi)) <= 1e-9
    assert b.iterations < a.iterations


def test_warm_start_agrees_with_cold_start():
    rng = np.random.default_rng(29)
    grid = random_grid(rng, 32)
    cold = solve(grid, SolverSettings(tolerance=1e-11))
    warm = solve(grid, SolverSettings(tolerance=1e-11),
                 initial_guess=np.roll(cold.phi, 1, axis=1))
    assert np.max(np.abs(cold.phi - warm.phi)) <= 1e-8


def test_initial_guess_shape_checked():
    grid = uniform_grid(16)
    with pytest.raises(ValueError):
        solve(grid, initial_guess=np.zeros((4, 4)))


def test_nonconvergence_raised_on_tiny_budget():
    rng = np.random.default_rng(31)
    grid = random_grid(rng, 32)
    with pytest.raises(NonConvergence):
        solve(grid, SolverSettings(tolerance=1e-12, max_iterations=3))


def test_settings_validation():
    with pytest.raises(ValueError):
        SolverSettings(method="gauss")
    with pytest.raises(ValueError):
        SolverSettings(preconditioner="ilu")
    with pytest.raises(ValueError):
        SolverSettings(sor_omega=2.0)


def test_assemble_rejects_bad_grids():
    with pytest.raises(ValueError):
        assemble(np.ones((4, 5)))
    with pytest.raises(ValueError):
        assemble(np.ones((2, 2)))


def test_face_conductance_is_harmonic_mean():
    assert face_conductance(1.0, 1.0) == pytest.approx(1.0)
    assert face_conductance(1.0, 1e-4) == pytest.approx(2e-4 / 1.0001)
    assert face_conductance(3.0, 6.0) == pytest.approx(4.0)


def test_linear_ramp_matches_interior_rows():
    x = linear_ramp(8)
    assert x.shape == (6, 8)
    assert np.allclose(x[:, 0], np.linspace(0, 1, 8)[1:-1])


def test_discrete_maximum_principle_exact():
    rng = np.random.default_rng(37)
    for _ in range(5):
        grid = random_grid(rng, 32, fill=rng.uniform(0.3, 0.8))
        pot = solve(grid)
        interior = pot.phi[1:-1]
        assert interior.min() >= 0.0
        assert interior.max() <= 1.0


@hyp_settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=10**6),
       st.floats(min_value=0.15, max_value=0.85))
def test_dense_equivalence_property(seed, fill):
    rng = np.random.default_rng(seed)
    grid = random_grid(rng, 8, fill=fill)
    iterative = solve(grid, SolverSettings(tolerance=1e-12))
    direct = dense_reference(grid)
    assert np.max(np.abs(iterative.phi - direct.phi)) <= 1e-8
