import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cxhyp import geometry as g
from cxhyp import kernels
from cxhyp.errors import DomainError, GridMismatchError, ParameterError

complex_points = st.integers(0, 2**32 - 1).map(np.random.default_rng)


def _ball_point(rng, n, radius=0.9):
    return g.BallPoint.from_complex(g.random_ball_points(n, 1, rng, radius)[0])


def test_geodesic_rho_examples():
    assert g.geodesic_rho(g.BallPoint((0.0, 0.0, 0.0, 0.0))) == 0.0
    assert g.geodesic_rho(g.BallPoint((math.tanh(1.0), 0.0))) == pytest.approx(1.0, rel=1e-14)
    assert g.geodesic_rho(g.BallPoint((0.0, 0.5, 0.0, 0.0))) == pytest.approx(0.5 * math.log(3.0), rel=1e-14)
    assert 0.5 * math.log(3.0) == pytest.approx(0.5493061, rel=1e-7)


def test_point_invariants():
    with pytest.raises(DomainError):
        g.BallPoint((0.8, 0.7))
    with pytest.raises(ParameterError):
        g.BallPoint((0.1, 0.2, 0.3))
    with pytest.raises(DomainError):
        g.SiegelPoint((0.1 + 0.2j,), 0.3, 0.0)


def test_mobius_examples():
    rng = np.random.default_rng(1)
    a = _ball_point(rng, 2)
    z = _ball_point(rng, 2)
    assert np.max(np.abs(g.mobius(a, a).z)) < 1e-14
    assert np.allclose(g.mobius(g.BallPoint((0.0,) * 4), z).z, -z.z, atol=1e-15)
    assert np.allclose(g.mobius(a, g.BallPoint((0.0,) * 4)).z, a.z, atol=1e-15)


def test_mobius_defining_identity_fifty_pairs():
    rng = np.random.default_rng(7)
    a = g.random_ball_points(3, 50, rng)
    z = g.random_ball_points(3, 50, rng)
    lhs = 1 - np.sum(np.abs(g.mobius_c(a, z)) ** 2, axis=-1)
    rhs = ((1 - np.sum(np.abs(a) ** 2, -1)) * (1 - np.sum(np.abs(z) ** 2, -1))
           / np.abs(1 - np.sum(z * np.conj(a), -1)) ** 2)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12)


@settings(max_examples=50, deadline=None)
@given(complex_points, st.integers(1, 4))
def test_mobius_involution_and_isometry(rng, n):
    a, z, w = (g.random_ball_points(n, 1, rng)[0] for _ in range(3))
    pz = g.mobius_c(a, z)
    assert np.max(np.abs(g.mobius_c(a, pz) - z)) < 1e-10
    d0 = g.distance_c(z, w)
    assert g.distance_c(pz, g.mobius_c(a, w)) == pytest.approx(d0, abs=1e-9)


def test_distance_examples():
    rng = np.random.default_rng(3)
    z = _ball_point(rng, 2)
    a = _ball_point(rng, 2)
    assert g.distance(z, z) == pytest.approx(0.0, abs=1e-7)
    assert g.distance(g.BallPoint((0.0,) * 4), a) == pytest.approx(g.geodesic_rho(a), rel=1e-13)


def test_triangle_inequality_hundred_triples():
    rng = np.random.default_rng(11)
    x, y, z = (g.random_ball_points(2, 100, rng) for _ in range(3))
    dxz = g.distance_c(x, z)
    assert np.all(dxz <= g.distance_c(x, y) + g.distance_c(y, z) + 1e-12)


def test_cayley_examples():
    q = g.cayley(g.BallPoint((0.0,) * 4))
    assert q.rho_coord == pytest.approx(1.0, rel=1e-15)
    assert q.t == 0.0
    assert np.allclose(q.w, [0, 1j])
    rng = np.random.default_rng(5)
    pts = g.random_ball_points(2, 100, rng, max_radius=0.99)
    assert all(g.cayley(g.BallPoint.from_complex(p)).rho_coord > 0 for p in pts)
    edge = [g.cayley(g.BallPoint((r, 0.0, 0.0, 0.0))).rho_coord for r in (0.9, 0.99, 0.999)]
    assert edge[0] > edge[1] > edge[2] and edge[2] < 3e-3


@settings(max_examples=50, deadline=None)
@given(complex_points, st.integers(1, 3))
def test_cayley_preserves_distance(rng, n):
    z, w = (_ball_point(rng, n, 0.8) for _ in range(2))
    d = g.siegel_distance(g.cayley(z), g.cayley(w))
    assert d == pytest.approx(g.distance(z, w), abs=1e-8)
    back = g.cayley_inverse(g.cayley(z))
    assert np.max(np.abs(back.z - z.z)) < 1e-12


def test_ball_volume_on_grid():
    grid = g.build_grid(2, 32, 8, rho_max=1.5, panel_order=8)
    exact = g.sphere_area(3) * math.sinh(1.5) ** 4 / 4
    assert np.sum(grid.volumes) == pytest.approx(exact, rel=1e-8)
    assert g.sphere_area(3) == pytest.approx(2 * math.pi**2, rel=1e-15)
    assert g.ball_volume(2, 1.5) == pytest.approx(exact, rel=1e-14)


def test_radial_rule_converges_at_design_order():
    # panel_order 2 gives a 4th-order composite rule
    exact = g.sphere_area(3) * math.sinh(1.5) ** 4 / 4
    errs = [abs(np.sum(g.build_grid(2, m, 4, rho_max=1.5, panel_order=2).volumes) / exact - 1)
            for m in (8, 16, 32)]
    assert errs[0] / errs[1] > 12 and errs[1] / errs[2] > 12


@pytest.mark.parametrize("n,phases", [(1, 8), (2, 8), (2, 16), (3, 8)])
def test_sphere_rule_weights_and_exactness(n, phases):
    rule = g.sphere_rule(n, phases)
    assert np.all(rule.weights > 0)
    assert rule.weights.sum() == pytest.approx(g.sphere_area(2 * n - 1), rel=1e-10)
    # |eta_1|^2 integrates to omega/n, |eta_1|^4 to 2 omega/(n(n+1))
    e1 = np.abs(rule.nodes[:, 0]) ** 2
    om = g.sphere_area(2 * n - 1)
    assert rule.integrate(e1) == pytest.approx(om / n, rel=1e-10)
    assert rule.integrate(e1**2) == pytest.approx(2 * om / (n * (n + 1)), rel=1e-10)
    assert abs(rule.integrate(rule.nodes[:, 0] ** 2)) < 1e-10 * om


def test_quasi_random_rule_weights():
    rule = g.sphere_rule(4, quasi_random=True, samples=1024)
    np.testing.assert_allclose(rule.weights, g.sphere_area(7) / 1024, rtol=1e-14)
    np.testing.assert_allclose(np.linalg.norm(rule.nodes, axis=1), 1.0, rtol=1e-12)


def test_radial_rule_polynomial_exactness():
    r, w = g.composite_gauss(0.0, 2.0, 4, 6)
    assert np.dot(w, r**11) == pytest.approx(2.0**12 / 12, rel=1e-12)


def test_grid_json_roundtrip():
    grid = g.build_grid(2, 8, 4, rho_max=1.0)
    again = g.QuadratureGrid.from_json(grid.to_json())
    np.testing.assert_array_equal(again.volumes, grid.volumes)


def test_convolve_zero_and_mismatch():
    grid = g.build_grid(2, 16, 8, rho_max=2.0)
    zero = g.NodeFunction(grid, np.zeros(grid.size))
    out = g.convolve_radial(lambda r: np.exp(-r), zero, np.zeros((2, 2), dtype=complex))
    assert np.all(out == 0)
    with pytest.raises(GridMismatchError):
        g.NodeFunction(grid, np.zeros(3))


def test_convolve_constant_against_kernel_mass():
    kern = lambda r: np.where(r < 1.0, (1 - np.minimum(r, 1.0) ** 2) ** 4, 0.0)  # noqa: E731
    grid = g.build_grid(2, 32, 8, rho_max=2.0, panel_order=8)
    one = g.NodeFunction.radial(grid, np.ones_like)
    val = g.convolve_radial(kern, one, np.zeros((1, 2), dtype=complex))[0]
    mass = kernels.radial_mass(kern, 0, complex_dim=2, rho_max=1.0)
    assert val == pytest.approx(mass, rel=1e-10)


def test_convolution_of_radial_functions_commutes():
    f = lambda r: np.exp(-r**2)  # noqa: E731
    k = lambda r: np.exp(-2 * r**2) * (1 + r * r)  # noqa: E731
    grid = g.axis_grid(2)
    pt = np.array([[math.tanh(0.7), 0.0]], dtype=complex)
    fk = g.convolve_radial(k, g.NodeFunction.radial(grid, f), pt)[0]
    kf = g.convolve_radial(f, g.NodeFunction.radial(grid, k), pt)[0]
    assert abs(fk - kf) <= 1e-10 * abs(fk)
    assert g.radial_convolution(f, k, 2, 0.7) == pytest.approx(fk, rel=1e-8)


def test_grid_function_sampling_and_domain():
    centers = np.array([[0.1, 0.0, 0.0, 0.2]])
    gf = g.GridFunction.sample(lambda c: c[0] + 2 * c[3], centers, 0.1, 2)
    assert gf.center_values()[0] == pytest.approx(0.5)
    with pytest.raises(ParameterError):
        g.GridFunction.sample(lambda c: c[0], centers, -0.1, 2)
