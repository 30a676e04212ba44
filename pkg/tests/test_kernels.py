import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cxhyp import kernels as K
from cxhyp import specfun
from cxhyp.errors import ParameterError


def test_heat_dim3_closed_form():
    rho = np.array([0.0, 0.3, 1.0, 2.5])
    t = 0.4
    ratio = np.where(rho > 0, rho / np.sinh(np.where(rho > 0, rho, 1.0)), 1.0)
    exact = (4 * math.pi * t) ** -1.5 * ratio * np.exp(-t - rho**2 / (4 * t))
    np.testing.assert_allclose(K.heat_real_odd(t, rho, 1), exact, rtol=1e-13)


@pytest.mark.parametrize("m,t", [(1, 0.25), (2, 0.5), (2, 1.0), (3, 0.7)])
def test_heat_real_odd_mass(m, t):
    assert K.radial_mass(lambda r: K.heat_real_odd(t, r, m), 2 * m + 1) == pytest.approx(1.0, abs=1e-8)


def test_heat_real_odd_semigroup():
    assert K.semigroup_defect(0.3, 0.7, np.linspace(0, 3, 13), dim=3) <= 1e-4


def test_heat_real_even_mass_and_positivity():
    assert K.radial_mass(lambda r: K.heat_real_even(0.5, r, 1), 2, rho_max=30) == pytest.approx(1.0, abs=1e-6)
    vals = K.heat_real_even(0.5, np.linspace(0.01, 10, 40), 1)
    assert np.all(vals > 0)


def test_heat_real_even_gaussian_decay():
    t = 0.25
    h6, h8 = K.heat_real_even(t, np.array([6.0, 8.0]), 1)
    slope = math.log(h8) - math.log(h6)
    assert slope == pytest.approx(-(64 - 36) / (4 * t), rel=0.1)


def test_heat_complex_mass():
    for t in (0.25, 1.0):
        m = K.radial_mass(lambda r: K.heat_complex(t, r, 2), 0, complex_dim=2,
                          rho_max=4 * t + 12 * math.sqrt(t) + 6, panels=40)
        assert m == pytest.approx(1.0, abs=1e-5)


def test_heat_complex_two_routes():
    a = K.heat_complex(0.5, 1.0, 2, route="odd")
    b = K.heat_complex(0.5, 1.0, 2, route="direct")
    assert a == pytest.approx(b, rel=1e-8)


def test_heat_complex_even_at_origin():
    eps = 1e-3
    v = K.heat_complex(0.5, np.array([0.0, eps, 2 * eps]), 2)
    assert abs(v[1] - v[0]) / eps < 1e-2 * v[0]
    assert abs((v[2] - v[0]) / (4 * (v[1] - v[0])) - 1) < 0.05  # quadratic start


def test_heat_complex_semigroup():
    assert K.semigroup_defect(0.3, 0.7, np.linspace(0, 3, 13), n=2) <= 1e-4


def test_bgr_small_rho_law():
    rho = 0.02
    lead = K.bgr_kernel(0.0, 1.0, rho, 2) * specfun.riesz_gamma(4, 1.0) * rho ** (4 - 1.0)
    assert lead == pytest.approx(1.0, rel=0.05)


def test_bgr_large_rho_law_zeta_zero():
    rho = np.linspace(5, 10, 11)
    alpha, n = 1.0, 2
    g = np.log(K.bgr_kernel(0.0, alpha, rho, n)) + n * rho - (alpha - 2) * np.log(rho)
    assert np.ptp(g) < 0.2


def test_bgr_decay_rate_positive_zeta():
    rho = np.linspace(4, 16, 13)
    q, _ = K.fit_decay(rho, K.bgr_kernel(0.5, 2.0, rho, 2))
    assert q == pytest.approx(2.5, rel=0.02)


def test_bgr_routes_agree():
    rho = np.array([0.05, 0.5, 2.0, 6.0])
    for zeta, alpha in ((0.0, 1.0), (0.7, 2.5), (1.0, 0.5)):
        np.testing.assert_allclose(K.bgr_kernel(zeta, alpha, rho, 2, route="mellin"),
                                   K.bgr_kernel(zeta, alpha, rho, 2, route="bessel"), rtol=1e-6)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.0, 2.0), st.floats(0.3, 2.9), st.sampled_from([2, 3]))
def test_bgr_positive_and_nonincreasing(zeta, alpha, n):
    rho = np.geomspace(1e-3, 12, 40)
    vals = K.bgr_kernel(zeta, alpha, rho, n)
    assert np.all(vals > 0)
    assert np.all(np.diff(vals) <= 1e-12 * vals[:-1])


def test_bgr_parameter_checks():
    with pytest.raises(ParameterError):
        K.bgr_kernel(0.0, 3.5, 1.0, 2)
    with pytest.raises(ParameterError):
        K.bgr_kernel(-1.0, 1.0, 1.0, 2)
    with pytest.raises(ParameterError):
        K.MellinConfig(t_min=1.0, t_max=0.5)
    with pytest.raises(ParameterError):
        K.MellinConfig(rel_tol=0.1)


def test_green_real_two_routes():
    assert K.green_real(1.0, 1.0, 3) == pytest.approx(K.green_real_mellin(1.0, 1.0, 3), rel=1e-4)
    # dimension 3 closed form e^{-nu rho} / (4 pi sinh rho)
    assert K.green_real(1.0, 1.0, 3) == pytest.approx(math.exp(-1.0) / (4 * math.pi * math.sinh(1.0)), rel=1e-10)


def test_green_real_decay_and_positivity():
    nu, dim = 0.8, 4
    rho = np.linspace(5, 14, 10)
    vals = K.green_real(nu, rho, dim)
    assert np.all(vals > 0)
    q, _ = K.fit_decay(rho, vals)
    assert q == pytest.approx(nu + (dim - 1) / 2, rel=0.02)


def test_green_complex_matches_potential_kernel():
    for nu in (0.5, 1.0):
        rho = np.array([0.5, 1.0, 2.0])
        np.testing.assert_allclose(K.green_complex(nu, rho, 2), K.bgr_kernel(nu, 2.0, rho, 2), rtol=1e-4)


def test_green_complex_asymptotics():
    small = np.geomspace(1e-4, 1e-3, 5)
    p = K.fit_power(small, K.green_complex(0.7, small, 2))
    assert -p == pytest.approx(2, rel=0.03)
    large = np.linspace(4, 14, 11)
    q, _ = K.fit_decay(large, K.green_complex(0.7, large, 2))
    assert q == pytest.approx(2.7, rel=0.02)


@pytest.mark.parametrize("beta,rho", [(2.0, 1.0), (4.0, 0.1), (1.0, 3.0)])
def test_abel_identity(beta, rho):
    assert K.abel_inversion_check(beta, rho)[2] <= 1e-8


def test_abel_identity_scaling():
    rhs = [K.abel_inversion_check(2.5, r)[1] * math.sinh(r) ** 2.5 for r in (0.2, 1.0, 2.0)]
    assert np.ptp(rhs) < 1e-14 * rhs[0]


def test_convolution_bounds():
    rep = K.conv_bound_check(1.0, 1.0, 1.0, 2)
    assert rep["small_rho_leading_ratio"] <= 1.1
    assert rep["large_rho_log_excess"] <= 0.2
    num, exact = K.riesz_planar_ratio(0.5, 0.5)
    assert num == pytest.approx(exact, rel=0.01)


def test_kernel_table_roundtrip_and_models():
    tab = K.kernel_table("k_zeta_alpha", 2, alpha=1.0, zeta=0.5)
    assert np.all(tab.values > 0) and tab.tail_model[2] > 0
    mid = np.array([0.37, 1.3, 4.2])
    np.testing.assert_allclose(tab(mid), K.bgr_kernel(0.5, 1.0, mid, 2), rtol=1e-5)
    assert tab(1e-6) == pytest.approx(K.bgr_kernel(0.5, 1.0, 1e-6, 2), rel=1e-3)
    again = K.RadialKernel.from_csv(tab.to_csv(), tab.sidecar())
    np.testing.assert_array_equal(again(mid), tab(mid))
    fine = np.linspace(0.01, 20, 500)
    assert np.all(np.diff(tab(fine)) <= 0)


def test_kernel_table_rejects_bad_input():
    with pytest.raises(ParameterError):
        K.RadialKernel("x", {}, [1.0, 2.0], [1.0, -1.0])
    with pytest.raises(ParameterError):
        K.kernel_table("nope", 2)


def test_table_coordinate_inverse():
    r = np.geomspace(1e-4, 30, 50)
    np.testing.assert_allclose(K.table_radius(K.table_coordinate(r)), r, rtol=1e-12)


def test_ball_volume_inverse():
    t = np.array([1e-4, 1.0, 1e3])
    np.testing.assert_allclose(K.ball_volume(2, K.ball_volume_inverse(2, t)), t, rtol=1e-12)
