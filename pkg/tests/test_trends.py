import math
from datetime import date, datetime, timedelta, timezone

import numpy as np
import pytest
from hypothesis import given, strategies as st
from statsmodels.nonparametric.smoothers_lowess import lowess as sm_lowess

from attitude_spectrum import trends
from attitude_spectrum.corpus import RawPost
from attitude_spectrum.trends import lowess, weekly_volume


def posts_at(days):
    base = datetime(2017, 1, 2, 9, tzinfo=timezone.utc)  # a Monday
    return [RawPost(str(i), "a", base + timedelta(days=float(d)), "") for i, d in enumerate(days)]


def test_single_week():
    assert weekly_volume(posts_at([0, 1, 2, 3, 4, 5, 6])) == [(date(2017, 1, 2), 7)]


def test_zero_fill():
    out = weekly_volume(posts_at([0, 15]))
    assert out == [(date(2017, 1, 2), 1), (date(2017, 1, 9), 0), (date(2017, 1, 16), 1)]


def test_volume_conservation():
    rng = np.random.default_rng(0)
    days = rng.uniform(0, 365, 500)
    out = weekly_volume(posts_at(days))
    assert sum(c for _, c in out) == 500
    assert all(w.isoweekday() == 1 for w, _ in out)
    assert all((b - a).days == 7 for (a, _), (b, _) in zip(out, out[1:]))


def sinusoid():
    rng = np.random.default_rng(42)
    x = np.sort(rng.uniform(0, 10, 100))
    return x, np.sin(x) + rng.normal(0, 0.3, 100)


def test_collinear_exact():
    x = np.linspace(0, 30, 57)
    for it in (0, 2):
        assert np.max(np.abs(lowess(x, 2 * x + 1, 0.3, it) - (2 * x + 1))) < 1e-8


def test_constant():
    x = np.arange(20.0)
    np.testing.assert_allclose(lowess(x, np.full(20, 3.5), 0.3, 2), 3.5, atol=1e-12)


@pytest.mark.parametrize("iterations", [0, 1, 2, 3])
@pytest.mark.parametrize("frac", [0.3, 0.5, 2 / 3])
def test_matches_reference_implementation(frac, iterations):
    x, y = sinusoid()
    # statsmodels floors frac * n, this implementation takes the ceiling
    span = math.ceil(frac * len(x) - 1e-9) / len(x)
    ref = sm_lowess(y, x, frac=span, it=iterations, delta=0.0, return_sorted=False)
    rms = np.sqrt(np.mean((lowess(x, y, frac, iterations) - ref) ** 2))
    assert rms < 1e-6


def test_unsorted_input_aligned():
    x, y = sinusoid()
    perm = np.random.default_rng(1).permutation(len(x))
    np.testing.assert_allclose(lowess(x[perm], y[perm])[np.argsort(perm)], lowess(x, y), atol=1e-12)


def test_insufficient_data():
    with pytest.raises(trends.InsufficientData):
        lowess([1.0], [2.0])


@given(st.floats(-10, 10).filter(lambda a: abs(a) > 1e-3), st.floats(-10, 10))
def test_affine_equivariance(a, b):
    x, y = sinusoid()
    np.testing.assert_allclose(lowess(x, a * y + b, 0.3, 0), a * lowess(x, y, 0.3, 0) + b, atol=1e-9)


def test_output_shape_and_window_bounds():
    x, y = sinusoid()
    out = lowess(x, y, 0.3, 0)
    assert out.shape == x.shape


def test_jitter_ties_stable_and_small():
    t = np.array([1.0, 1.0, 2.0, 1.0])
    ids = ["a", "b", "c", "d"]
    j = trends.jitter_ties(t, ids)
    assert len(set(j[[0, 1, 3]])) == 3
    assert j[2] == 2.0
    assert np.all(np.abs(j - t) < 1 / 86400)
    np.testing.assert_array_equal(j, trends.jitter_ties(t, ids))


def test_degenerate_windows_stay_within_range():
    x = np.array([0.0] * 10 + [5.0] * 10)
    y = np.random.default_rng(2).random(20)
    out = lowess(x, y, 0.3, 0)
    np.testing.assert_allclose(out[:10], y[:10].mean(), atol=1e-12)
    np.testing.assert_allclose(out[10:], y[10:].mean(), atol=1e-12)
