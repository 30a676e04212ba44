"""Sphere integrals of kernels of the Hermitian pairing on S^{2n-1}.

The pairing is (z, w) = sum_j z_j conj(w_j). A kernel K of the pairing acts
diagonally on the bidegree spaces H_{j,k}; the eigenvalue is a Jacobi-weighted
integral of the Fourier modes of K on circles of radius sqrt((1+t)/2).
"""

from __future__ import annotations

import json
import math

import numpy as np
from scipy import special

from . import specfun
from .errors import ParameterError, QuadratureError
from .geometry import SphereRule, sphere_rule

__all__ = [
    "aligned_rule",
    "bidegree_harmonic",
    "direct_eigenvalue",
    "eigenvalue_constant",
    "funk_hecke_eigenvalue",
    "pole_unitary",
    "sphere_integral",
    "verify_radial_eigenvalues",
]


def pole_unitary(xi) -> np.ndarray:
    """Unitary matrix whose first column is the unit vector xi."""
    xi = np.asarray(xi, dtype=complex)
    xi = xi / np.linalg.norm(xi)
    n = len(xi)
    # Gram-Schmidt on [xi, e_1, ..., e_n]
    basis = [xi]
    for e in np.eye(n, dtype=complex):
        v = e - sum(np.vdot(b, e) * b for b in basis)
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            basis.append(v / nv)
        if len(basis) == n:
            break
    return np.stack(basis, axis=1)


def aligned_rule(n: int, phases: int = 256, gauss: int = 24) -> SphereRule:
    """Sphere rule resolving functions of eta_1 only (the pole direction)."""
    return sphere_rule(n, phases=[phases] + [1] * (n - 1), gauss=[gauss] + [1] * (n - 2))


def sphere_integral(kernel, r: float, xi, n: int, rule: SphereRule | None = None,
                    aligned: bool = True) -> float:
    """Integral of K((r xi, eta)) over eta in S^{2n-1}.

    Args:
        kernel: vectorized function of a complex pairing value.
        r: radius in [0, 1).
        xi: unit pole in C^n.
        n: complex dimension.
        rule: sphere rule; default depends on `aligned`.
        aligned: rotate the rule so that its first axis points along xi,
            which makes a one-coordinate rule exact up to its resolution.

    Returns:
        Real part of the integral (the imaginary part must vanish).
    """
    if not 0 <= r < 1:
        raise ParameterError("r must lie in [0, 1)")
    xi = np.asarray(xi, dtype=complex)
    if xi.shape != (n,) or abs(np.linalg.norm(xi) - 1.0) > 1e-12:
        raise ParameterError("xi must be a unit vector in C^n")
    if rule is None:
        rule = aligned_rule(n) if aligned else sphere_rule(n, phases=48)
    nodes = rule.nodes @ pole_unitary(xi).T if aligned else rule.nodes
    w = r * (nodes.conj() @ xi)  # (r xi, eta)
    vals = np.asarray(kernel(w), dtype=complex)
    out = np.sum(rule.weights * vals)
    if abs(out.imag) > 1e-8 * max(1.0, abs(out.real)):
        raise QuadratureError("sphere integral has a non-negligible imaginary part")
    return float(out.real)


def eigenvalue_constant(j: int, k: int, n: int, pi_to_m: bool = False) -> float:
    """Prefactor of the Jacobi-weighted integral giving lambda_{j,k}.

    Args:
        j, k: bidegree.
        n: complex dimension, >= 2.
        pi_to_m: use pi^m in place of pi^{n-1}. That variant does not
            reproduce the sphere integral and is kept only to display the
            discrepancy.
    """
    m = min(j, k)
    d = abs(j - k)
    power = m if pi_to_m else n - 1
    logc = (power * math.log(math.pi) + math.lgamma(m + 1) - (n - 1 + d / 2.0) * math.log(2.0)
            - math.lgamma(m + n - 1))
    return math.exp(logc)


def funk_hecke_eigenvalue(j: int, k: int, kernel, n: int, theta_nodes: int = 256,
                          t_nodes: int = 48, pi_to_m: bool = False) -> float:
    """Eigenvalue of eta -> int K((xi, eta)) Y(eta) dsigma on H_{j,k}.

    The circle integral is done by the trapezoid rule; the t-integral by
    Gauss-Jacobi.

    Args:
        j, k: bidegree, nonnegative.
        kernel: vectorized function of a complex argument in the unit disc.
        n: complex dimension, >= 2.
        theta_nodes: trapezoid nodes on the circle.
        t_nodes: Gauss-Jacobi nodes.
        pi_to_m: use the pi^m prefactor variant.

    Returns:
        lambda_{j,k}.
    """
    if n < 2 or j < 0 or k < 0:
        raise ParameterError("need n >= 2 and nonnegative bidegree")
    m = min(j, k)
    d = abs(j - k)
    # the circle integral is r^d times a smooth function of t, r = sqrt((1+t)/2);
    # folding r^d into the weight gives (1-t)^{n-2} (1+t)^d and spectral convergence
    t, wt = special.roots_jacobi(t_nodes, n - 2.0, float(d))
    theta = 2 * np.pi * np.arange(theta_nodes) / theta_nodes - np.pi
    rad = np.sqrt((1.0 + t) / 2.0)
    arg = np.exp(-1j * theta)[None, :] * rad[:, None]
    inner = np.asarray(kernel(arg), dtype=complex) @ np.exp(1j * (j - k) * theta)
    inner *= 2 * np.pi / theta_nodes
    inner /= rad**d * 2.0 ** (d / 2.0)
    jac = specfun.jacobi_poly(m, n - 2.0, float(d), t)
    val = np.sum(wt * inner * jac)
    return float(eigenvalue_constant(j, k, n, pi_to_m) * val.real)


def bidegree_harmonic(j: int, k: int):
    """Y(eta) = eta_1^j conj(eta_2)^k, a harmonic polynomial of bidegree (j, k) on C^n, n >= 2."""
    return lambda eta: eta[..., 0] ** j * np.conj(eta[..., 1]) ** k


def direct_eigenvalue(j: int, k: int, kernel, n: int, xi=None, phases: int | None = None,
                      gauss: int | None = None) -> float:
    """lambda_{j,k} from int K((xi, eta)) Y(eta) dsigma(eta) / Y(xi) by sphere quadrature.

    Args:
        j, k: bidegree.
        kernel: vectorized function of a complex argument in the closed unit disc.
        n: complex dimension, >= 2.
        xi: unit point with Y(xi) != 0; default (1, 1, 0, ...)/sqrt(2).
        phases: trapezoid phases of the product sphere rule (default 64 for
            n = 2, 24 otherwise).
        gauss: Gauss nodes per latitude angle (default from the rule).
    """
    if n < 2:
        raise ParameterError("need n >= 2")
    if xi is None:
        xi = np.zeros(n, dtype=complex)
        xi[:2] = 1.0 / math.sqrt(2.0)
    xi = np.asarray(xi, dtype=complex)
    y = bidegree_harmonic(j, k)
    y0 = y(xi)
    if abs(y0) < 1e-8:
        raise ParameterError("Y vanishes at xi")
    if phases is None:
        phases = 64 if n == 2 else 24
    rule = sphere_rule(n, phases=phases, gauss=gauss)
    w = rule.nodes.conj() @ xi  # (xi, eta)
    val = np.sum(rule.weights * kernel(w) * y(rule.nodes)) / y0
    if abs(val.imag) > 1e-8 * max(1.0, abs(val.real)):
        raise QuadratureError("direct eigenvalue has a non-negligible imaginary part")
    return float(val.real)


def verify_radial_eigenvalues(alpha: float, r_values, n: int, tol: float = 1e-6) -> dict:
    """Check that the sphere integral of |1 - (r xi, eta)|^{-alpha} is a constant multiple of F(a/2, a/2; n; r^2).

    Returns:
        Report dict with the ratio Q(r) at each radius, its relative spread,
        the constant estimate, and both candidate reference constants.
    """
    if not 0 < alpha < 2 * n:
        raise ParameterError("need 0 < alpha < 2n")
    xi = np.zeros(n, dtype=complex)
    xi[0] = 1.0
    kern = lambda w: np.abs(1.0 - w) ** (-alpha)  # noqa: E731
    q = []
    for r in r_values:
        lhs = sphere_integral(kern, float(r), xi, n)
        q.append(lhs / specfun.gauss_2f1(alpha / 2.0, alpha / 2.0, float(n), float(r) ** 2))
    q = np.array(q)
    const = float(np.mean(q))
    spread = float((q.max() - q.min()) / abs(const))
    omega = specfun.sphere_area(2 * n - 1)
    two_pi_gamma = 2.0 * math.pi / specfun.gamma_fn(n)
    const_err = abs(const / omega - 1.0)
    return {
        "alpha": alpha,
        "n": n,
        "r_values": [float(r) for r in r_values],
        "Q_values": q.tolist(),
        "constant_estimate": const,
        "omega_reference": omega,
        "two_pi_over_gamma_n": two_pi_gamma,
        "relative_spread": spread,
        "constant_rel_error": const_err,
        "pass": bool(spread <= tol and const_err <= tol),
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)
