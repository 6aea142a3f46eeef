"""Threshold power-law fits: model values and parameter recovery."""
import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from diskperc.fitting import DegenerateData, FitResult, fit, model


def synthetic(p_c: float, t: float, points: int = 21):
    p = np.linspace(0.0, 1.0, points)
    return p, model(p, p_c, t)


def test_model_reference_values():
    assert model(1.0, 0.6763, 4 / 3) == pytest.approx(1.0)
    assert model(0.6763, 0.6763, 4 / 3) == 0.0
    assert model(0.5, 0.6763, 4 / 3) == 0.0
    assert model(0.8, 0.6763475, 4 / 3) == pytest.approx(0.2772, abs=5e-5)


def test_model_vectorized_and_monotone():
    p = np.linspace(0, 1, 101)
    y = model(p, 0.4, 1.5)
    assert y.shape == p.shape
    assert np.all(np.diff(y) >= 0)
    assert y[0] == 0.0 and y[-1] == pytest.approx(1.0)


def test_round_trip_recovery():
    p, s = synthetic(0.6763, 1.3333)
    result = fit(p, s)
    assert abs(result.p_c - 0.6763) <= 1e-3
    assert abs(result.t - 1.3333) <= 1e-2
    assert result.sse <= 1e-6
    assert result.points == 21


def test_round_trip_various_parameters():
    for p_c, t in [(0.3, 0.8), (0.5, 2.0), (0.75, 1.0), (0.66, 4.0)]:
        p, s = synthetic(p_c, t, points=41)
        result = fit(p, s)
        assert abs(result.p_c - p_c) <= 2e-3
        assert abs(result.t - t) <= 2e-2


def test_seed_is_carried_through():
    p, s = synthetic(0.6, 1.2)
    assert fit(p, s, seed=7).seed == 7
    assert fit(p, s).seed is None


def test_result_stays_in_search_domain():
    # data rising from the very first fraction pushes the threshold to
    # the domain edge; the result must stay inside the searched box
    p = np.linspace(0.0, 1.0, 21)
    s = p**0.25
    result = fit(p, s)
    assert 0.05 <= result.p_c <= 0.95
    assert 0.2 <= result.t <= 5.0


def test_degenerate_flat_curve():
    p = np.linspace(0, 1, 11)
    with pytest.raises(DegenerateData):
        fit(p, np.full(11, 1e-4))


def test_degenerate_too_few_points():
    with pytest.raises(DegenerateData):
        fit([0.1, 0.1, 0.9], [0.0, 0.0, 1.0])


def test_scale_perturbation_moves_argmin_little():
    p, s = synthetic(0.64, 1.4, points=31)
    base = fit(p, s)
    nudged = fit(p, s * 1.001)
    assert abs(nudged.p_c - base.p_c) <= 5e-3
    assert abs(nudged.t - base.t) <= 5e-2


def test_subthreshold_background_does_not_distort():
    p, s = synthetic(0.66, 1.33, points=41)
    noisy = np.where(s == 0.0, 1e-4, s)
    result = fit(p, noisy)
    assert abs(result.p_c - 0.66) <= 2e-3
    assert abs(result.t - 1.33) <= 2e-2


@hyp_settings(max_examples=15, deadline=None)
@given(st.floats(min_value=0.2, max_value=0.85),
       st.floats(min_value=0.4, max_value=3.5))
def test_round_trip_property(p_c, t):
    p, s = synthetic(p_c, t, points=41)
    result = fit(p, s)
    assert abs(result.p_c - p_c) <= 3e-3
    assert abs(result.t - t) <= 3e-2
