import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cxhyp import rearrange as R
from cxhyp.errors import ParameterError, RangeError
from cxhyp.geometry import ball_volume

samples = st.integers(1, 15).flatmap(lambda k: st.tuples(
    st.lists(st.floats(-5, 5, allow_nan=False), min_size=k, max_size=k),
    st.lists(st.floats(0.01, 3.0), min_size=k, max_size=k),
)).map(lambda vm: R.WeightedSamples(np.array(vm[0]), np.array(vm[1])))


def _bump(radius):
    return lambda r: np.where(r < radius, (1 - (np.minimum(r, radius) / radius) ** 2) ** 3, 0.0)


def test_rearrangement_of_small_example():
    f = R.WeightedSamples([1.0, -3.0, 2.0, 3.0], [0.5, 1.0, 2.0, 0.25])
    fs = R.decreasing_rearrangement(f)
    np.testing.assert_array_equal(fs.values, [3.0, 2.0, 1.0])
    np.testing.assert_allclose(fs.breaks, [0.0, 1.25, 3.25, 3.75])
    assert fs(0.0) == 3.0 and fs(1.25) == 2.0 and fs(10.0) == 0.0
    assert fs.cumulative(2.0) == pytest.approx(3.75 + 1.5)


@settings(max_examples=80, deadline=None)
@given(samples, st.floats(1.0, 6.0))
def test_equimeasurable(f, p):
    fs = R.decreasing_rearrangement(f)
    assert np.all(np.diff(fs.values) < 0)
    assert fs.integral_power(p) == pytest.approx(f.lp_norm(p) ** p, rel=1e-12, abs=1e-300)
    for level in (0.0, 0.5, 2.0):
        dist_f = float(np.sum(f.measures[np.abs(f.values) > level]))
        dist_s = float(np.sum(np.diff(fs.breaks)[fs.values > level]))
        assert dist_s == pytest.approx(dist_f, rel=1e-12, abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(samples, st.floats(0.01, 20.0))
def test_double_star_dominates_and_decreases(f, t):
    fs = R.decreasing_rearrangement(f)
    ds = R.double_star(fs)
    assert ds(t) >= fs(t) * (1 - 1e-12)
    assert ds(t * 1.5) <= ds(t) * (1 + 1e-12)
    for a, b, v, d in ds.pieces():
        probe = a + 0.3 * (min(b, a + 5.0) - a)
        if probe > 0:
            assert ds(probe) == pytest.approx(v + d / probe, rel=1e-12, abs=1e-15)


@settings(max_examples=80, deadline=None)
@given(samples, st.floats(1.05, 6.0), st.sampled_from([1.0, 1.5, 2.0, 4.0, math.inf]))
def test_lorentz_norm_chain(f, p, q):
    lo = R.lorentz_norm(f, p, q)
    hi = R.lorentz_norm(f, p, q, starred=True)
    assert lo <= hi * (1 + 1e-10)
    assert hi <= p / (p - 1) * lo * (1 + 1e-10)


@settings(max_examples=40, deadline=None)
@given(samples, st.floats(1.05, 6.0))
def test_lorentz_diagonal_is_lp(f, p):
    assert R.lorentz_norm(f, p, p) == pytest.approx(f.lp_norm(p), rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("A,p,q", [(0.7, 2.0, 1.0), (3.0, 1.5, 3.0), (2.0, 4.0, 2.0)])
def test_lorentz_of_indicator(A, p, q):
    # f* = 1 on [0, A); f** = min(1, A/t)
    f = R.WeightedSamples([1.0], [A])
    assert R.lorentz_norm(f, p, q) == pytest.approx((p / q) ** (1 / q) * A ** (1 / p), rel=1e-13)
    starred = A ** (1 / p) * (p / q + 1 / (q * (1 - 1 / p))) ** (1 / q)
    assert R.lorentz_norm(f, p, q, starred=True) == pytest.approx(starred, rel=1e-12)
    assert R.lorentz_norm(f, p, math.inf) == pytest.approx(A ** (1 / p), rel=1e-14)
    assert R.lorentz_norm(f, p, math.inf, starred=True) == pytest.approx(A ** (1 / p), rel=1e-14)


def test_lorentz_ranges_and_zero():
    f = R.WeightedSamples([1.0], [1.0])
    with pytest.raises(RangeError):
        R.lorentz_norm(f, 1.0, 2.0)
    with pytest.raises(RangeError):
        R.lorentz_norm(f, 2.0, 0.5)
    assert R.lorentz_norm(R.WeightedSamples([0.0], [1.0]), 2.0, 2.0) == 0.0


def test_container_invariants():
    with pytest.raises(ParameterError):
        R.WeightedSamples([1.0, 2.0], [1.0])
    with pytest.raises(ParameterError):
        R.WeightedSamples([1.0], [0.0])
    with pytest.raises(ParameterError):
        R.StepFunction([0.0, 1.0, 1.0], [2.0, 1.0])
    with pytest.raises(ParameterError):
        R.double_star(R.StepFunction([0.0, 1.0], [1.0]))(0.0)


def test_step_function_csv():
    fs = R.StepFunction([0.0, 0.5, 2.0], [3.0, 1.0])
    lines = fs.to_csv().strip().splitlines()
    assert lines[0] == "t_breakpoint,value"
    assert lines[-1] == "2.0,0.0"


def test_radial_samples_measure_ball_volume():
    s = R.radial_samples(np.ones_like, 2, 1.5)
    assert s.total == pytest.approx(ball_volume(2, 1.5), rel=1e-12)


def test_oneil_bound_on_bumps():
    rep = R.oneil_pointwise_check(_bump(1.5), _bump(1.0), 2, [0.1, 1.0, 5.0], support=1.5)
    assert rep["u_nonincreasing"] and rep["pass"]
    assert all(r["slack"] >= 0 for r in rep["rows"])


def test_oneil_rejects_increasing_profile():
    with pytest.raises(ParameterError):
        R.oneil_pointwise_check(lambda r: r, _bump(1.0), 2, [1.0], support=1.0)


def test_rearranged_kernel_small_and_large_t():
    rep = R.rearranged_kernel_bounds("k_zeta_alpha", {"n": 2, "alpha": 1.0, "zeta": 1.0}, [1e-6, 1e-4])
    assert abs(rep["leading_ratio"][0] - 1) < abs(rep["leading_ratio"][1] - 1) + 1e-3
    assert rep["leading_ratio"][0] == pytest.approx(1.0, abs=0.05)
    assert rep["large_t_exponent_fixed_log"] == pytest.approx(rep["predicted_exponent"], abs=0.01)


def test_rearranged_kernel_zero_zeta():
    rep = R.rearranged_kernel_bounds("k_alpha", {"n": 2, "alpha": 1.0}, [1e-5])
    assert rep["leading_ratio"][0] == pytest.approx(1.0, abs=0.05)
    assert rep["large_t_exponent_fixed_log"] == pytest.approx(-0.5, abs=0.01)
    with pytest.raises(ParameterError):
        R.rearranged_kernel_bounds("k_alpha", {"n": 1, "alpha": 2.5}, [1e-5])


def test_l2_tail_is_finite_and_stable():
    a = R.l2_tail_check(1.0, 1.0, 1.0, 2, 1.0, rho_max=10.0)
    b = R.l2_tail_check(1.0, 1.0, 1.0, 2, 1.0, rho_max=14.0, panels=16)
    assert math.isfinite(a["value"]) and a["tail_power"] < -0.5
    assert b["value"] == pytest.approx(a["value"], rel=0.01)
    with pytest.raises(ParameterError):
        R.l2_tail_check(2.0, 1.0, 1.0, 2, 1.0)
