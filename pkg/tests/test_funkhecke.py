import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from cxhyp import funkhecke as F
from cxhyp import specfun
from cxhyp.errors import ParameterError


def _moment(j, n):
    # integral of |eta_1|^{2j} over S^{2n-1}
    return specfun.sphere_area(2 * n - 1) * math.factorial(j) * math.factorial(n - 1) / math.factorial(n + j - 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_pole_unitary(seed, n):
    rng = np.random.default_rng(seed)
    xi = rng.normal(size=n) + 1j * rng.normal(size=n)
    xi /= np.linalg.norm(xi)
    u = F.pole_unitary(xi)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(n), atol=1e-12)
    np.testing.assert_allclose(u[:, 0], xi, atol=1e-14)


def test_sphere_integral_of_constant():
    for n in (1, 2, 3):
        xi = np.eye(n, dtype=complex)[0]
        val = F.sphere_integral(lambda w: np.ones_like(w), 0.5, xi, n)
        assert val == pytest.approx(specfun.sphere_area(2 * n - 1), rel=1e-13)


def test_circle_case_against_quadrature():
    alpha, r = 1.0, 0.5
    ref = integrate.quad(lambda th: abs(1 - r * np.exp(-1j * th)) ** -alpha, 0, 2 * math.pi,
                         epsabs=0, epsrel=1e-13)[0]
    got = F.sphere_integral(lambda w: np.abs(1 - w) ** -alpha, r, np.array([1.0 + 0j]), 1)
    assert got == pytest.approx(ref, rel=1e-10)
    assert ref == pytest.approx(2 * math.pi * specfun.gauss_2f1(0.5, 0.5, 1.0, 0.25), rel=1e-12)


@pytest.mark.parametrize("n,alpha", [(2, 1.0), (2, 2.0), (3, 2.0), (3, 4.5)])
def test_radial_sphere_integral_is_hypergeometric(n, alpha):
    rep = F.verify_radial_eigenvalues(alpha, [0.0, 0.3, 0.6, 0.9], n)
    assert rep["relative_spread"] <= 1e-6
    assert rep["constant_rel_error"] <= 1e-6
    assert rep["pass"]


def test_sphere_integral_rotation_invariant():
    n = 2
    kern = lambda w: np.abs(1 - w) ** -1.5  # noqa: E731
    xi = np.array([0.6, 0.8j])
    a = F.sphere_integral(kern, 0.7, xi, n)
    b = F.sphere_integral(kern, 0.7, np.array([1.0 + 0j, 0.0]), n)
    assert a == pytest.approx(b, rel=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("j", [0, 1, 3])
def test_eigenvalue_of_monomial_kernel(n, j):
    # K(w) = w^j acts on H_{j,0} by the sphere moment and kills H_{j+1,0}
    kern = lambda w: w**j  # noqa: E731
    assert F.funk_hecke_eigenvalue(j, 0, kern, n) == pytest.approx(_moment(j, n), rel=1e-12)
    assert abs(F.funk_hecke_eigenvalue(j + 1, 0, kern, n)) < 1e-12 * _moment(j, n)
    conj_kern = lambda w: np.conj(w) ** j  # noqa: E731
    assert F.funk_hecke_eigenvalue(0, j, conj_kern, n) == pytest.approx(_moment(j, n), rel=1e-12)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("jk", [(0, 0), (1, 0), (2, 1), (1, 3)])
def test_eigenvalue_two_routes(n, jk):
    kern = lambda w: np.abs(1 - 0.5 * w) ** -3.0  # noqa: E731
    a = F.funk_hecke_eigenvalue(*jk, kern, n)
    b = F.direct_eigenvalue(*jk, kern, n)
    assert a == pytest.approx(b, rel=1e-6)


def test_pi_power_variant_disagrees_when_m_differs():
    kern = lambda w: np.abs(1 - 0.5 * w) ** -3.0  # noqa: E731
    n, j, k = 3, 1, 0
    good = F.funk_hecke_eigenvalue(j, k, kern, n)
    alt = F.funk_hecke_eigenvalue(j, k, kern, n, pi_to_m=True)
    assert alt / good == pytest.approx(math.pi ** (min(j, k) - (n - 1)), rel=1e-12)
    assert F.eigenvalue_constant(1, 1, 2, pi_to_m=True) == F.eigenvalue_constant(1, 1, 2)


def test_parameter_checks():
    xi = np.array([1.0 + 0j, 0.0])
    with pytest.raises(ParameterError):
        F.sphere_integral(np.abs, 1.0, xi, 2)
    with pytest.raises(ParameterError):
        F.sphere_integral(np.abs, 0.5, np.array([1.0, 1.0]), 2)
    with pytest.raises(ParameterError):
        F.funk_hecke_eigenvalue(0, 0, np.abs, 1)
    with pytest.raises(ParameterError):
        F.direct_eigenvalue(1, 1, np.abs, 2, xi=xi)
    with pytest.raises(ParameterError):
        F.verify_radial_eigenvalues(5.0, [0.1], 2)


@pytest.mark.parametrize("n", [2, 3])
def test_eigenvalues_symmetric_for_real_symmetric_kernel(n):
    # K(conj w) = K(w), real valued
    kern = lambda w: np.abs(1 - 0.4 * w) ** -2.0 + np.real(w) ** 2  # noqa: E731
    for j, k in ((1, 0), (2, 1), (3, 1)):
        a = F.funk_hecke_eigenvalue(j, k, kern, n)
        b = F.funk_hecke_eigenvalue(k, j, kern, n)
        assert a == pytest.approx(b, rel=1e-12, abs=1e-14)
