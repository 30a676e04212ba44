import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from cxhyp import specfun
from cxhyp.errors import DivergenceError, DomainError, ParameterError, RangeError

# Gamma(2.5) by direct quadrature of int_0^inf x^{1.5} e^{-x} dx, frozen
GAMMA_2_5 = 1.329340388179137


def test_gamma_half_and_integers():
    assert specfun.gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-13)
    assert specfun.gamma_fn(5) == 24.0
    assert specfun.gamma_fn(1) == 1.0


def test_gamma_two_and_a_half_against_quadrature():
    val = integrate.quad(lambda x: x**1.5 * math.exp(-x), 0, math.inf, epsabs=0, epsrel=1e-13)[0]
    assert val == pytest.approx(GAMMA_2_5, rel=1e-12)
    assert specfun.gamma_fn(2.5) == pytest.approx(GAMMA_2_5, rel=1e-13)


def test_gamma_vectorized_and_domain():
    x = np.array([0.3, 1.7, 6.2])
    np.testing.assert_allclose(specfun.gamma_fn(x), [float(mpmath.gamma(v)) for v in x], rtol=1e-13)
    with pytest.raises(DomainError):
        specfun.gamma_fn(0.0)
    with pytest.raises(DomainError):
        specfun.log_gamma(-1.0)


@pytest.mark.parametrize("x", [0.3, 1.7, 6.2])
def test_gamma_recurrence(x):
    assert specfun.gamma_fn(x + 1) == pytest.approx(x * specfun.gamma_fn(x), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=0.05, max_value=50.0))
def test_gamma_matches_high_precision(x):
    assert specfun.gamma_fn(x) == pytest.approx(float(mpmath.gamma(x)), rel=1e-13)
    assert specfun.log_gamma(x) == pytest.approx(float(mpmath.loggamma(x)), rel=1e-12, abs=1e-13)


def test_pochhammer_examples():
    assert specfun.pochhammer(2.7, 0) == 1.0
    assert specfun.pochhammer(3, 2) == 12.0
    assert specfun.pochhammer(0.5, 3) == pytest.approx(1.875, rel=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=0.1, max_value=20.0), st.integers(min_value=0, max_value=15))
def test_pochhammer_gamma_ratio(a, k):
    ratio = specfun.gamma_fn(a + k) / specfun.gamma_fn(a)
    assert specfun.pochhammer(a, k) == pytest.approx(ratio, rel=1e-11)


def test_2f1_examples():
    assert specfun.gauss_2f1(0.3, 1.2, 2.5, 0.0) == 1.0
    assert specfun.gauss_2f1(1, 1, 2, 0.5) == pytest.approx(-math.log(0.5) / 0.5, rel=1e-13)
    assert specfun.gauss_2f1(1, 1, 2, 0.81) == pytest.approx(-math.log(0.19) / 0.81, rel=1e-12)
    assert -math.log(0.5) / 0.5 == pytest.approx(1.3862943611, rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(0.1, 3.0), st.floats(0.5, 4.0), st.floats(0.0, 0.95))
def test_2f1_against_mpmath(a, b, c, z):
    ref = float(mpmath.hyp2f1(a, b, c, z))
    assert specfun.gauss_2f1(a, b, c, z) == pytest.approx(ref, rel=1e-11)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(0.1, 3.0), st.floats(0.5, 4.0),
       st.floats(0.0, 0.9), st.floats(0.0, 0.9))
def test_2f1_nondecreasing_in_z(a, b, c, z1, z2):
    lo, hi = sorted((z1, z2))
    assert specfun.gauss_2f1(a, b, c, lo) <= specfun.gauss_2f1(a, b, c, hi) * (1 + 1e-14)


def test_2f1_divergent_at_one():
    # c - a - b <= 0 at z = 1
    with pytest.raises((DivergenceError, DomainError, ParameterError)):
        specfun.gauss_2f1(1.0, 1.0, 2.0, 1.0)


def test_3f2_examples():
    assert specfun.gen_3f2_at1(1.3, 0.7, 0.0, 2.0, 3.0) == 1.0
    partial = sum(1.0 / (k + 1) ** 2 for k in range(2_000_000))
    assert partial == pytest.approx(math.pi**2 / 6, rel=1e-6)
    assert specfun.gen_3f2_at1(1, 1, 1, 2, 2) == pytest.approx(math.pi**2 / 6, rel=1e-10)


def test_3f2_beta_integral_oracle():
    # int_0^1 x^{mu-1}(1-x)^{nu-1} F(a,b;c;x) dx = B(mu,nu) 3F2(a,b,mu; c, mu+nu; 1)
    a, b, c, mu, nu = 0.5, 0.5, 2.0, 1.5, 1.0
    lhs = integrate.quad(lambda x: x ** (mu - 1) * (1 - x) ** (nu - 1) * float(mpmath.hyp2f1(a, b, c, x)),
                         0, 1, epsabs=0, epsrel=1e-12)[0]
    beta = specfun.gamma_fn(mu) * specfun.gamma_fn(nu) / specfun.gamma_fn(mu + nu)
    assert beta * specfun.gen_3f2_at1(a, b, mu, c, mu + nu) == pytest.approx(lhs, rel=1e-9)


def test_jacobi_examples():
    assert specfun.jacobi_poly(0, 0.3, 1.2, 0.4) == 1.0
    assert specfun.jacobi_poly(1, 0.7, 2.0, 1.0) == pytest.approx(1.7, rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 8), st.floats(-0.9, 4.0), st.floats(-0.9, 4.0), st.floats(-1.0, 1.0))
def test_jacobi_against_scipy(m, al, be, t):
    ref = float(special.eval_jacobi(m, al, be, t))
    assert specfun.jacobi_poly(m, al, be, t) == pytest.approx(ref, rel=1e-10, abs=1e-12)


def test_jacobi_weighted_integral_closed_form():
    # int (1-t)^{n-1}(1+t)^{d+mu} P_m^{(n-1,d)} dt for (n, j, k, mu, m) = (2, 1, 0, 2, 1), d = |j-k|
    n, d, mu, m = 2, 1, 2, 1
    lhs = integrate.quad(lambda t: (1 - t) ** (n - 1) * (1 + t) ** (d + mu)
                         * specfun.jacobi_poly(m, n - 1, d, t), -1, 1, epsabs=0, epsrel=1e-13)[0]
    # closed form 2^{n+d+mu} Gamma(mu+1) Gamma(n+m) Gamma(d+mu+1) / (m! Gamma(mu-m+1) Gamma(n+d+mu+m+1))
    g = specfun.gamma_fn
    rhs = (2.0 ** (n + d + mu) * g(mu + 1) * g(n + m) * g(d + mu + 1)
           / (math.factorial(m) * g(mu - m + 1) * g(n + d + mu + m + 1)))
    assert lhs == pytest.approx(rhs, rel=1e-11)


def test_constants_examples():
    assert specfun.adams_beta0(1, 2) == pytest.approx(4 * math.pi, rel=1e-12)
    assert specfun.adams_beta0(2, 4) == pytest.approx(32 * math.pi**2, rel=1e-12)
    assert specfun.sphere_area(3) == pytest.approx(2 * math.pi**2, rel=1e-14)
    n, alpha = 2, 1.0
    p = 2 * n / alpha
    pp = p / (p - 1)
    ident = 2 * n / specfun.sphere_area(2 * n - 1) * specfun.riesz_gamma(2 * n, alpha) ** pp
    assert specfun.beta_frac(n, alpha) == pytest.approx(ident, rel=1e-12)


def _mp_riesz(n, a):
    return mpmath.pi ** (mpmath.mpf(n) / 2) * 2**a * mpmath.gamma(mpmath.mpf(a) / 2) / mpmath.gamma((n - mpmath.mpf(a)) / 2)


@pytest.mark.parametrize("n,k,alpha,m", [(3, 1, 1.0, 1), (6, 2, 2.5, 4), (8, 3, 5.0, 5), (5, 2, 0.5, 3)])
def test_constants_table_independent_evaluation(n, k, alpha, m):
    mpmath.mp.dps = 30
    tab = specfun.constants(n, k=k, alpha=alpha, m=m)
    om = 2 * mpmath.pi ** (mpmath.mpf(n + 1) / 2) / mpmath.gamma(mpmath.mpf(n + 1) / 2)
    s = mpmath.gamma(mpmath.mpf(n + 2 * k) / 2) / mpmath.gamma(mpmath.mpf(n - 2 * k) / 2) * om ** (mpmath.mpf(2 * k) / n)
    if m % 2:
        lg = mpmath.gamma(mpmath.mpf(m + 1) / 2) / mpmath.gamma(mpmath.mpf(n - m + 1) / 2)
    else:
        lg = mpmath.gamma(mpmath.mpf(m) / 2) / mpmath.gamma(mpmath.mpf(n - m) / 2)
    om_nm1 = 2 * mpmath.pi ** (mpmath.mpf(n) / 2) / mpmath.gamma(mpmath.mpf(n) / 2)
    b0 = n / om_nm1 * (mpmath.pi ** (mpmath.mpf(n) / 2) * 2**m * lg) ** (mpmath.mpf(n) / (n - m))
    assert tab.get("omega") == pytest.approx(float(om), rel=1e-12)
    assert tab.get("S") == pytest.approx(float(s), rel=1e-12)
    assert tab.get("beta0") == pytest.approx(float(b0), rel=1e-12)
    assert tab.get("gamma_riesz") == pytest.approx(float(_mp_riesz(n, alpha)), rel=1e-12)
    if alpha < 2 * n:
        p = mpmath.mpf(2 * n) / alpha
        bf = 2 * n / (2 * mpmath.pi**n / mpmath.gamma(n)) * _mp_riesz(2 * n, alpha) ** (p / (p - 1))
        assert tab.get("beta_frac") == pytest.approx(float(bf), rel=1e-12)
    again = specfun.ConstantsTable.from_json(tab.to_json(), n)
    assert [e.value for e in again.entries] == [e.value for e in tab.entries]


def test_constants_range_errors():
    with pytest.raises(RangeError):
        specfun.sobolev_constant(4, 2)
    with pytest.raises(RangeError):
        specfun.adams_beta0(3, 3)
    with pytest.raises(RangeError):
        specfun.riesz_gamma(2, 2.0)


def test_series_config_invariants():
    with pytest.raises(ParameterError):
        specfun.SeriesConfig(rel_tol=0.1)
    with pytest.raises(ParameterError):
        specfun.SeriesConfig(max_terms=10)
