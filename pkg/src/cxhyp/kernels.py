"""Heat, Green and Bessel-Green-Riesz kernels on real and complex hyperbolic space.

Conventions: real hyperbolic space H^N has curvature -1 and bottom of
spectrum (N-1)^2/4; the complex ball B^n has real dimension 2n, Bergman
metric of holomorphic curvature -4 and bottom of spectrum n^2. All kernels
are radial profiles in the geodesic distance rho.

The odd-dimensional real heat kernel is built from D^m G with
D = -(1/sinh r) d/dr and G = exp(-r^2/4t). We write

    D^m G = G * sum_{j=1..m} (2t)^{-j} R_{m,j}(r)

and obtain R_{m,j} exactly, either as rational combinations of
r^a sinh(r)^-c cosh(r)^d (large r) or as power series in w = cosh r - 1
(small r, where the closed form cancels badly).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import integrate, interpolate, special

from . import specfun
from .errors import ParameterError, QuadratureError
from .geometry import ball_volume, radial_convolution, sphere_area

TAIL_LOG = 40.0  # integrands are truncated once they fall below exp(-TAIL_LOG)
SERIES_SWITCH = 1.0  # r below this uses the w-series branch
SERIES_TERMS = 60


# ---------------------------------------------------------------------------
# exact derivative terms


@lru_cache(maxsize=None)
def derivative_terms(m: int) -> tuple:
    """Exact R_{m,j} for j = 0..m as dicts {(a, c, d): Fraction}.

    Each key stands for r^a sinh(r)^-c cosh(r)^d.
    """
    if m < 0:
        raise ParameterError("m must be nonnegative")
    rows = [{(0, 0, 0): Fraction(1)}]
    for _ in range(m):
        new = [dict() for _ in range(len(rows) + 1)]
        for j, poly in enumerate(rows):
            for (a, c, d), co in poly.items():
                # D(r^a s^-c C^d) = -a r^{a-1} s^{-c-1} C^d + c r^a s^{-c-2} C^{d+1} - d r^a s^-c C^{d-1}
                if a:
                    _acc(new[j], (a - 1, c + 1, d), -a * co)
                if c:
                    _acc(new[j], (a, c + 2, d + 1), c * co)
                if d:
                    _acc(new[j], (a, c, d - 1), -d * co)
                # multiplication by r / sinh r from differentiating G
                _acc(new[j + 1], (a + 1, c + 1, d), co)
        rows = [{k: v for k, v in p.items() if v != 0} for p in new]
    return tuple(rows)


def _acc(poly, key, val):
    poly[key] = poly.get(key, 0) + val


@lru_cache(maxsize=None)
def series_terms(m: int, terms: int = SERIES_TERMS) -> np.ndarray:
    """Power-series coefficients of R_{m,j} in w = cosh r - 1, shape (m+1, terms)."""
    size = terms + m + 1
    q = [Fraction((-1) ** k * math.factorial(k) ** 2 * 2**k, math.factorial(2 * k + 1))
         for k in range(size)]
    rows = [[Fraction(1)] + [Fraction(0)] * (size - 1)]
    for _ in range(m):
        new = [[Fraction(0)] * size for _ in range(len(rows) + 1)]
        for j, coef in enumerate(rows):
            for k in range(size - 1):
                new[j][k] -= (k + 1) * coef[k + 1]
            for k in range(size):
                if coef[k]:
                    for i in range(size - k):
                        new[j + 1][k + i] += q[i] * coef[k]
        rows = new
    return np.array([[float(c) for c in row[:terms]] for row in rows])


def _eval_terms(poly: dict, r: np.ndarray) -> np.ndarray:
    s = np.sinh(r)
    c = np.cosh(r)
    lr = np.log(r)
    ls = np.log(s)
    out = np.zeros_like(r)
    for (a, cc, d), co in poly.items():
        out += float(co) * np.exp(a * lr - cc * ls) * c**d
    return out


def radial_factors(m: int, r) -> np.ndarray:
    """Values of R_{m,j}(r), j = 0..m, shape (m+1,) + r.shape."""
    shape = np.shape(r)
    r = np.asarray(r, dtype=float).ravel()
    out = np.zeros((m + 1,) + r.shape)
    small = r < SERIES_SWITCH
    if np.any(small):
        w = 2.0 * np.sinh(0.5 * r[small]) ** 2
        coef = series_terms(m)
        for j in range(m + 1):
            out[j][small] = np.polynomial.polynomial.polyval(w, coef[j])
    if np.any(~small):
        rl = r[~small]
        for j, poly in enumerate(derivative_terms(m)):
            out[j][~small] = _eval_terms(poly, rl)
    return out.reshape((m + 1,) + shape)


def d_gaussian(m: int, r, t) -> np.ndarray:
    """(-(1/sinh r) d/dr)^m exp(-r^2/4t), broadcasting r against t."""
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    fac = radial_factors(m, r)
    rr, tt = np.broadcast_arrays(r, t)
    tot = np.zeros(rr.shape)
    for j in range(1, m + 1):
        tot = tot + (2.0 * t) ** (-j) * fac[j]
    if m == 0:
        tot = np.ones(rr.shape)
    return tot * np.exp(-(r**2) / (4.0 * t))


def d_gaussian_taylor(m: int, r, t) -> np.ndarray:
    """Same quantity as d_gaussian by truncated Taylor arithmetic in r.

    Independent of the term rewriting: expands G(r + e) and 1/sinh(r + e) as
    power series in e and applies -(1/sinh) d/de m times. Loses accuracy for
    small r, where the expansion of 1/sinh is dominated by its pole.
    """
    r = np.asarray(r, dtype=float)
    t = float(t)
    order = m + 1
    # exp(-(2 r e + e^2)/4t) as a series in e
    p = [np.zeros_like(r), -r / (2.0 * t), np.full_like(r, -1.0 / (4.0 * t))]
    p += [np.zeros_like(r)] * order
    e = [np.ones_like(r)]
    for k in range(1, order):
        e.append(sum(i * p[i] * e[k - i] for i in range(1, k + 1)) / k)
    s0, c0 = np.sinh(r), np.cosh(r)
    sh = [(s0 if k % 2 == 0 else c0) / math.factorial(k) for k in range(order)]
    inv = [1.0 / s0]
    for k in range(1, order):
        inv.append(-sum(sh[i] * inv[k - i] for i in range(1, k + 1)) / s0)
    f = e
    for _ in range(m):
        df = [(k + 1) * f[k + 1] for k in range(len(f) - 1)]
        f = [-sum(inv[i] * df[k - i] for i in range(k + 1)) for k in range(len(df))]
    return f[0] * np.exp(-(r**2) / (4.0 * t))


# ---------------------------------------------------------------------------
# singular radial integrals


def abel_nodes(rho: float, span: float, double: bool = True, per_panel: int = 12,
               depth: int = 26) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for integral_rho^{rho+span} F(r) / sqrt(cosh(kr) - cosh(k rho)) dr.

    k = 2 when double is set, otherwise k = 1. The substitution r = rho + s^2
    removes the inverse square root; the differences of cosh are formed as
    products of sinh so no cancellation occurs. Panels in s are geometric
    toward 0 to resolve features at any scale.

    Returns:
        (r, w) with sum(w * F(r)) approximating the integral.
    """
    if span <= 0:
        raise ParameterError("span must be positive")
    smax = math.sqrt(span)
    x, wx = np.polynomial.legendre.leggauss(per_panel)
    edges = [0.0] + [smax * 2.0 ** (-k) for k in range(depth, 2, -1)] + list(np.linspace(smax / 4, smax, 7))
    edges = np.array(edges)
    a, b = edges[:-1], edges[1:]
    s = (0.5 * (a + b))[:, None] + (0.5 * (b - a))[:, None] * x
    ws = (0.5 * (b - a))[:, None] * wx
    s, ws = s.ravel(), ws.ravel()
    s2 = s * s
    if double:
        diff = 2.0 * np.sinh(2.0 * rho + s2) * np.sinh(s2)
    else:
        diff = 2.0 * np.sinh(rho + 0.5 * s2) * np.sinh(0.5 * s2)
    return rho + s2, ws * 2.0 * s / np.sqrt(diff)


def _span_gauss(rho: float, t: float, decay: float) -> float:
    """Integration length past rho for an integrand ~ exp(-r^2/4t - decay r)."""
    g = math.sqrt(rho * rho + 4.0 * t * TAIL_LOG) - rho
    return min(g, TAIL_LOG / decay) if decay > 0 else g


# ---------------------------------------------------------------------------
# real hyperbolic heat kernels


def _shaped(out, like):
    return out.reshape(np.shape(like)) if np.ndim(like) else float(out[0])


def _check_t(t):
    if np.any(np.asarray(t) <= 0):
        raise ParameterError("t must be positive")


def heat_real_odd(t: float, rho, m: int):
    """Heat kernel on H^{2m+1}.

    Args:
        t: time, > 0.
        rho: distance(s), >= 0.
        m: half of (dimension - 1), >= 1.

    Returns:
        Kernel values, same shape as rho.
    """
    _check_t(t)
    if m < 1:
        raise ParameterError("m must be at least 1")
    rho = np.asarray(rho, dtype=float)
    out = _odd_scaled(t, rho, m) * np.exp(-m * m * t)
    return out if out.ndim else float(out)


def _odd_scaled(t, r, m):
    """exp(m^2 t) times the H^{2m+1} heat kernel."""
    return 2.0 ** (-m - 1) * math.pi ** (-m - 0.5) * np.asarray(t) ** -0.5 * d_gaussian(m, r, t)


def heat_real_even(t: float, rho, m: int, per_panel: int = 12):
    """Heat kernel on H^{2m}, by the Abel-type integral over r > rho.

    Args:
        t: time, > 0.
        rho: distance(s), >= 0.
        m: half the dimension, >= 1.
        per_panel: Gauss nodes per panel of the regularized integral.

    Returns:
        Kernel values, same shape as rho.
    """
    _check_t(t)
    if m < 1:
        raise ParameterError("m must be at least 1")
    rho_a = np.asarray(rho, dtype=float).ravel()
    pref = (2 * math.pi) ** (-m - 0.5) * t**-0.5 * math.exp(-((2 * m - 1) ** 2) * t / 4.0)
    vals = []
    for p in rho_a:
        r, w = abel_nodes(p, _span_gauss(p, t, m), double=False, per_panel=per_panel)
        vals.append(pref * np.sum(w * np.sinh(r) * d_gaussian(m, r, t)))
    out = np.array(vals)
    if not np.all(np.isfinite(out)):
        raise QuadratureError("heat_real_even produced non-finite values")
    return _shaped(out, rho)


# ---------------------------------------------------------------------------
# complex hyperbolic heat kernel


def heat_complex(t: float, rho, n: int, route: str = "odd", per_panel: int = 12):
    """Heat kernel of the Laplace-Beltrami operator on B^n.

    Args:
        t: time, > 0.
        rho: distance(s), >= 0.
        n: complex dimension, >= 2.
        route: "odd" integrates the H^{2n+1} kernel against the Abel weight;
            "direct" differentiates the Gaussian by Taylor arithmetic inside
            the same weight (independent check, reliable for rho >~ 0.3).
        per_panel: Gauss nodes per panel.

    Returns:
        Kernel values, same shape as rho.
    """
    _check_t(t)
    if n < 1:
        raise ParameterError("n must be at least 1")
    rho_a = np.asarray(rho, dtype=float).ravel()
    vals = []
    for p in rho_a:
        r, w = abel_nodes(p, _span_gauss(p, t, n), double=True, per_panel=per_panel)
        if route == "odd":
            h = heat_real_odd(t, r, n)
            vals.append(2.0**1.5 * np.sum(w * np.sinh(r) * h))
        elif route == "direct":
            pref = 2.0 ** (-n + 0.5) * math.pi ** (-n - 0.5) * math.exp(-n * n * t) * t**-0.5
            vals.append(pref * np.sum(w * np.sinh(r) * d_gaussian_taylor(n, r, t)))
        else:
            raise ParameterError(f"unknown route {route!r}")
    out = np.array(vals)
    return _shaped(out, rho)


def heat_complex_scaled(t, rho: float, n: int, per_panel: int = 12) -> np.ndarray:
    """exp(n^2 t) times the B^n heat kernel at one rho, vectorized over t."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(len(t))
    for i, tt in enumerate(t):
        r, w = abel_nodes(rho, _span_gauss(rho, tt, n), double=True, per_panel=per_panel)
        out[i] = 2.0**1.5 * np.sum(w * np.sinh(r) * _odd_scaled(tt, r, n))
    return out


def radial_mass(profile, dim: int, complex_dim: int | None = None, rho_max: float = 60.0,
                panels: int = 240, order: int = 16) -> float:
    """Integral of a radial profile over H^dim, or over B^n when complex_dim is given."""
    from .geometry import composite_gauss
    r, w = composite_gauss(0.0, rho_max, panels, order)
    if complex_dim is not None:
        n = complex_dim
        dens = sphere_area(2 * n - 1) * np.sinh(r) ** (2 * n - 1) * np.cosh(r)
    else:
        dens = sphere_area(dim - 1) * np.sinh(r) ** (dim - 1)
    return float(np.sum(w * dens * profile(r)))


def real_radial_convolution(f, g, dim: int, rho, r_max: float = 20.0, panels: int = 80,
                            order: int = 12, angles: int = 64) -> np.ndarray:
    """Convolution of bounded radial profiles on H^dim.

    cosh d = cosh rho cosh r - sinh rho sinh r cos(theta), integrated against
    omega_{dim-2} sin(theta)^{dim-2} sinh(r)^{dim-1}.
    """
    from .geometry import composite_gauss
    r, wr = composite_gauss(0.0, r_max, panels, order)
    x, wx = np.polynomial.legendre.leggauss(angles)
    theta = 0.5 * np.pi * (x + 1.0)
    wt = 0.5 * np.pi * wx * np.sin(theta) ** (dim - 2)
    out = []
    for p in np.atleast_1d(rho):
        ch = np.cosh(p) * np.cosh(r)[:, None] - np.sinh(p) * np.sinh(r)[:, None] * np.cos(theta)
        d = np.arccosh(np.maximum(ch, 1.0))
        inner = f(d) @ wt
        out.append(sphere_area(dim - 2) * np.sum(wr * g(r) * np.sinh(r) ** (dim - 1) * inner))
    out = np.array(out)
    return _shaped(out, rho)


def semigroup_defect(t: float, s: float, rho, dim: int | None = None, n: int | None = None) -> float:
    """Sup-relative defect of h_t * h_s against h_{t+s} at the given radii.

    Pass dim (odd, >= 3) for real hyperbolic space or n for the complex ball.
    The complex factors are tabulated first; the reference kernel is evaluated
    directly.
    """
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    if (dim is None) == (n is None):
        raise ParameterError("give exactly one of dim and n")
    if dim is not None:
        if dim < 3 or dim % 2 == 0:
            raise ParameterError("real route needs an odd dimension >= 3")
        m = (dim - 1) // 2
        conv = real_radial_convolution(lambda r: heat_real_odd(t, r, m), lambda r: heat_real_odd(s, r, m),
                                       dim, rho)
        exact = heat_real_odd(t + s, rho, m)
    else:
        if np.any(rho < 0):
            raise ParameterError("rho must be nonnegative")
        ht = kernel_table("heat_complex", n, t=t, rho_max=16.0)
        hs = kernel_table("heat_complex", n, t=s, rho_max=16.0)
        conv = np.empty_like(rho)
        pos = rho > 0
        if np.any(pos):
            conv[pos] = radial_convolution(ht, hs, n, rho[pos], r_max=12.0)
        # at the origin the convolution is the inner product of the profiles
        conv[~pos] = radial_mass(lambda r: heat_complex(t, r, n) * heat_complex(s, r, n), 0,
                                 complex_dim=n, rho_max=12.0, panels=40)
        exact = heat_complex(t + s, rho, n)
    return float(np.max(np.abs(conv - exact)) / np.max(np.abs(exact)))


# ---------------------------------------------------------------------------
# Bessel-Green-Riesz kernels


@dataclass(frozen=True)
class MellinConfig:
    """Controls for the t-integral of the resolvent and potential kernels.

    Args:
        t_min: lower cutoff (reduced automatically to rho^2/200 when smaller).
        t_max: upper cutoff for zeta = 0; an analytic t^{-3/2} tail is added beyond it.
        panels_per_unit: Gauss panels per unit of log t.
        t_nodes: Gauss nodes per log t panel.
        r_nodes: Gauss nodes per panel of the r-integral.
        rel_tol: target relative accuracy (used to size the truncation).
    """

    t_min: float = 1e-6
    t_max: float = 1e8
    panels_per_unit: float = 0.75
    t_nodes: int = 10
    r_nodes: int = 12
    rel_tol: float = 1e-10

    def __post_init__(self):
        if not (0 < self.t_min < self.t_max):
            raise ParameterError("need 0 < t_min < t_max")
        if not (0 < self.rel_tol <= 1e-3):
            raise ParameterError("rel_tol must lie in (0, 1e-3]")


def _check_bgr(zeta, alpha, n):
    if zeta < 0:
        raise ParameterError("zeta must be nonnegative")
    if zeta == 0 and not (0 < alpha < 3):
        raise ParameterError("zeta = 0 needs 0 < alpha < 3 (the t-integral diverges otherwise)")
    if zeta > 0 and not (0 < alpha < 2 * n):
        raise ParameterError("zeta > 0 needs 0 < alpha < 2n")


def _log_t_rule(lo: float, hi: float, cfg: MellinConfig):
    from .geometry import composite_gauss
    a, b = math.log(lo), math.log(hi)
    panels = max(2, int(math.ceil((b - a) * cfg.panels_per_unit)))
    u, w = composite_gauss(a, b, panels, cfg.t_nodes)
    t = np.exp(u)
    return t, w * t


def bgr_kernel(zeta: float, alpha: float, rho, n: int, cfg: MellinConfig | None = None,
               route: str = "mellin"):
    """Kernel of (-Delta_B - n^2 + zeta^2)^{-alpha/2} on B^n.

    Mellin route: (1/Gamma(alpha/2)) int t^{alpha/2-1} e^{(n^2-zeta^2)t} p_t(rho) dt,
    with p_t written as an Abel integral of the H^{2n+1} heat kernel and
    both integrals done by quadrature. Bessel route: the t-integral of each
    term of D^n G is done in closed form with modified Bessel functions.

    Args:
        zeta: shift, >= 0.
        alpha: order; 0 < alpha < 2n (zeta > 0) or 0 < alpha < 3 (zeta = 0).
        rho: distance(s) > 0.
        n: complex dimension.
        cfg: quadrature controls for the Mellin route.
        route: "mellin" or "bessel".

    Returns:
        Kernel values.
    """
    _check_bgr(zeta, alpha, n)
    cfg = cfg or MellinConfig()
    rho_a = np.asarray(rho, dtype=float).ravel()
    if np.any(rho_a <= 0):
        raise ParameterError("rho must be positive")
    if route == "mellin":
        out = np.array([_bgr_mellin(zeta, alpha, p, n, cfg) for p in rho_a])
    elif route == "bessel":
        out = np.array([_bgr_bessel(zeta, alpha, p, n, cfg.r_nodes) for p in rho_a])
    else:
        raise ParameterError(f"unknown route {route!r}")
    return _shaped(out, rho)


def _bgr_mellin(zeta, alpha, rho, n, cfg):
    t_lo = min(cfg.t_min, rho * rho / 200.0)
    t_hi = cfg.t_max if zeta * zeta * cfg.t_max < TAIL_LOG + 20.0 else (TAIL_LOG + 20.0) / zeta**2
    t, wt = _log_t_rule(t_lo, t_hi, cfg)
    t = np.append(t, t_hi)  # last entry only feeds the tail constant
    r, wr = abel_nodes(rho, TAIL_LOG / n, double=True, per_panel=cfg.r_nodes)
    fac = radial_factors(n, r)[1:]  # (n, R)
    # D^n G for every (t, r) pair
    j = np.arange(1, n + 1)[:, None]
    coef = (2.0 * t[None, :]) ** (-j)  # (n, T)
    poly = coef.T @ fac  # (T, R)
    gauss = np.exp(-(r[None, :] ** 2) / (4.0 * t[:, None]))
    heat = 2.0 ** (-n - 1) * math.pi ** (-n - 0.5) * t[:, None] ** -0.5 * poly * gauss
    p_t = 2.0**1.5 * heat @ (wr * np.sinh(r))  # exp(n^2 t) p_t(rho)
    weight = t ** (alpha / 2.0 - 1.0) * np.exp(-zeta * zeta * t)
    total = np.sum(wt * weight[:-1] * p_t[:-1])
    if zeta == 0:
        # p_t ~ C t^{-3/2} for large t
        c = p_t[-1] * t_hi**1.5
        total += c * t_hi ** (alpha / 2.0 - 1.5) / (1.5 - alpha / 2.0)
    return total / specfun.gamma_fn(alpha / 2.0)


def _bessel_moments(zeta, alpha, r, n):
    """int_0^inf t^{alpha/2 - 3/2 - j} exp(-zeta^2 t - r^2/4t) dt for j = 1..n."""
    out = []
    for j in range(1, n + 1):
        nu = alpha / 2.0 - 0.5 - j
        if zeta > 0:
            x = zeta * r
            out.append(2.0 * (r / (2.0 * zeta)) ** nu * special.kve(nu, x) * np.exp(-x))
        else:
            out.append((r * r / 4.0) ** nu * special.gamma(-nu))
    return np.array(out)


def _bgr_bessel(zeta, alpha, rho, n, per_panel=12):
    decay = n + zeta
    r, wr = abel_nodes(rho, TAIL_LOG / decay + 2.0, double=True, per_panel=per_panel)
    fac = radial_factors(n, r)[1:]
    mom = _bessel_moments(zeta, alpha, r, n)
    scale = 2.0 ** -np.arange(1, n + 1)[:, None]
    m = 2.0 ** (-n - 1) * math.pi ** (-n - 0.5) * np.sum(scale * fac * mom, axis=0)
    return 2.0**1.5 * np.sum(wr * np.sinh(r) * m) / specfun.gamma_fn(alpha / 2.0)


# ---------------------------------------------------------------------------
# Green's functions


def green_real(nu: float, rho, dim: int):
    """Kernel of (nu^2 - (dim-1)^2/4 - Delta_H)^{-1} on H^dim, closed form.

    Args:
        nu: > 0.
        rho: distance(s) > 0.
        dim: real dimension >= 2.
    """
    if nu <= 0:
        raise ParameterError("nu must be positive")
    rho_a = np.asarray(rho, dtype=float).ravel()
    if np.any(rho_a <= 0):
        raise ParameterError("rho must be positive")
    c = ((2 * math.pi) ** (-dim / 2.0) * specfun.gamma_fn((dim - 1) / 2.0 + nu)
         / (2.0 ** (nu + 0.5) * specfun.gamma_fn(nu + 0.5)))
    p = (dim - 3) / 2.0 - nu
    vals = []
    for r in rho_a:
        vals.append(c * np.sinh(r) ** (2 - dim) * _cos_integral(np.cosh(r), p, nu))
    out = np.array(vals)
    return _shaped(out, rho)


def _cos_integral(ch: float, p: float, nu: float) -> float:
    """int_0^pi (ch + cos t)^p sin(t)^{2 nu} dt with x = cos t."""
    val, err = integrate.quad(lambda x: (ch + x) ** p, -1.0, 1.0, weight="alg",
                              wvar=(nu - 0.5, nu - 0.5), epsabs=0.0, epsrel=1e-13, limit=200)
    if not np.isfinite(val) or err > 1e-8 * abs(val):
        raise QuadratureError("inner Green integral did not converge")
    return val


def green_real_mellin(nu: float, rho, dim: int, cfg: MellinConfig | None = None):
    """Same kernel as green_real from the heat kernel: int e^{-(nu^2-(dim-1)^2/4)t} h_t dt."""
    if dim % 2 == 0:
        raise ParameterError("the Mellin route is implemented for odd dimensions")
    cfg = cfg or MellinConfig()
    m = (dim - 1) // 2
    rho_a = np.asarray(rho, dtype=float).ravel()
    vals = []
    for p in rho_a:
        t, wt = _log_t_rule(min(cfg.t_min, p * p / 200.0), min(cfg.t_max, (TAIL_LOG + 20) / nu**2), cfg)
        vals.append(np.sum(wt * np.exp(-nu * nu * t) * _odd_scaled(t, p, m)))
    out = np.array(vals)
    return _shaped(out, rho)


def green_complex(nu: float, rho, n: int, per_panel: int = 12):
    """Kernel of (nu^2 - n^2 - Delta_B)^{-1} on B^n from its double-integral formula.

    Args:
        nu: > 0.
        rho: distance(s) > 0.
        n: complex dimension.
        per_panel: Gauss nodes per panel of the outer integral.
    """
    if nu <= 0:
        raise ParameterError("nu must be positive")
    rho_a = np.asarray(rho, dtype=float).ravel()
    if np.any(rho_a <= 0):
        raise ParameterError("rho must be positive")
    c = ((2 * math.pi) ** (-(2 * n + 1) / 2.0) * specfun.gamma_fn(n + nu)
         / (2.0 ** (nu - 1.0) * specfun.gamma_fn(nu + 0.5)))
    p = n - 1 - nu
    vals = []
    for q in rho_a:
        r, w = abel_nodes(q, TAIL_LOG / (n + nu) + 2.0, double=True, per_panel=per_panel)
        inner = np.array([_cos_integral(ch, p, nu) for ch in np.cosh(r)])
        vals.append(c * np.sum(w * np.sinh(r) ** (2 - 2 * n) * inner))
    out = np.array(vals)
    return _shaped(out, rho)


# ---------------------------------------------------------------------------
# Abel-weight identity


def abel_inversion_check(beta: float, rho: float) -> tuple[float, float, float]:
    """Compare int_rho^inf cosh r sinh(r)^-beta (cosh 2r - cosh 2 rho)^{-1/2} dr with its closed form.

    Returns:
        (numeric value, closed form, relative error).
    """
    if beta <= 0 or rho <= 0:
        raise ParameterError("need beta > 0 and rho > 0")
    r, w = abel_nodes(rho, TAIL_LOG / beta + 1.0, double=True, per_panel=16)
    lhs = float(np.sum(w * np.cosh(r) * np.sinh(r) ** -beta))
    rhs = (math.sqrt(math.pi) * specfun.gamma_fn(beta / 2.0)
           / (2.0 * math.sqrt(2.0) * specfun.gamma_fn((1.0 + beta) / 2.0) * math.sinh(rho) ** beta))
    return lhs, rhs, abs(lhs - rhs) / abs(rhs)


# ---------------------------------------------------------------------------
# tabulated kernels


@dataclass
class RadialKernel:
    """Tabulated positive radial profile with analytic end models.

    Inside the table the profile is interpolated by a monotone cubic in
    (log rho + rho, log value); below the first node by c * rho^p and beyond the
    last node by c * rho^p * exp(-q rho).
    """

    kind: str
    params: dict
    grid: np.ndarray
    values: np.ndarray
    small_rho_model: tuple = (1.0, 0.0)
    tail_model: tuple = (1.0, 0.0, 1.0)
    _interp: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.grid.shape != self.values.shape or self.grid.ndim != 1:
            raise ParameterError("grid and values must be matching 1-D arrays")
        if np.any(np.diff(self.grid) <= 0):
            raise ParameterError("grid must be increasing")
        if np.any(self.values <= 0):
            raise ParameterError("kernel values must be positive")
        if not self.tail_model[2] > 0:
            raise ParameterError("tail decay rate must be positive")
        self._interp = interpolate.PchipInterpolator(table_coordinate(self.grid), np.log(self.values))

    @classmethod
    def from_table(cls, kind, params, grid, values, fit_points: int = 3) -> "RadialKernel":
        """Build a kernel and fit its end models to the first and last table nodes."""
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        lg, lv = np.log(grid), np.log(values)
        p = (lv[1] - lv[0]) / (lg[1] - lg[0])
        small = (float(values[0] / grid[0] ** p), float(p))
        k = fit_points
        a = np.stack([np.ones(k), lg[-k:], -grid[-k:]], axis=1)
        coef = np.linalg.lstsq(a, lv[-k:], rcond=None)[0]
        tail = (float(np.exp(coef[0])), float(coef[1]), float(max(coef[2], 1e-6)))
        # pin the tail model to the last value exactly
        tail = (float(values[-1] / (grid[-1] ** tail[1] * np.exp(-tail[2] * grid[-1]))), tail[1], tail[2])
        return cls(kind, dict(params), grid, values, small, tail)

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        out = np.empty_like(rho)
        lo = rho < self.grid[0]
        hi = rho > self.grid[-1]
        mid = ~(lo | hi)
        out[mid] = np.exp(self._interp(table_coordinate(rho[mid])))
        c, p = self.small_rho_model
        out[lo] = c * rho[lo] ** p
        c, p, q = self.tail_model
        out[hi] = c * rho[hi] ** p * np.exp(-q * rho[hi])
        return out if out.ndim else float(out)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["rho", "value"])
        for g, v in zip(self.grid, self.values):
            wr.writerow([repr(float(g)), repr(float(v))])
        return buf.getvalue()

    def sidecar(self) -> str:
        return json.dumps({"kind": self.kind, "params": self.params,
                           "tail_model": list(self.tail_model),
                           "small_rho_model": list(self.small_rho_model)}, sort_keys=True)

    @classmethod
    def from_csv(cls, text: str, sidecar: str) -> "RadialKernel":
        rows = list(csv.reader(io.StringIO(text)))[1:]
        meta = json.loads(sidecar)
        grid = np.array([float(r[0]) for r in rows])
        vals = np.array([float(r[1]) for r in rows])
        return cls(meta["kind"], meta["params"], grid, vals,
                   tuple(meta["small_rho_model"]), tuple(meta["tail_model"]))


def table_coordinate(rho):
    """Interpolation variable u = log(rho) + rho: logarithmic near 0, linear far out."""
    rho = np.asarray(rho, dtype=float)
    return np.log(rho) + rho


def table_radius(u):
    """Inverse of table_coordinate by Newton iteration."""
    u = np.asarray(u, dtype=float)
    r = np.where(u < 0, np.exp(u), np.maximum(u, 0.5))
    for _ in range(60):
        step = (np.log(r) + r - u) / (1.0 / r + 1.0)
        r = np.maximum(r - step, 0.5 * r)
        if np.all(np.abs(step) <= 1e-15 * r):
            break
    return r


def default_grid(rho_min: float = 1e-4, rho_max: float = 24.0, step: float = 0.05) -> np.ndarray:
    """Table nodes equally spaced in log(rho) + rho."""
    if not 0 < rho_min < rho_max:
        raise ParameterError("need 0 < rho_min < rho_max")
    u0, u1 = table_coordinate(rho_min), table_coordinate(rho_max)
    count = int(math.ceil((u1 - u0) / step)) + 1
    g = table_radius(np.linspace(u0, u1, count))
    g[0], g[-1] = rho_min, rho_max
    return g


@lru_cache(maxsize=64)
def kernel_table(kind: str, n: int, alpha: float = 0.0, zeta: float = 0.0, t: float = 0.0,
                 rho_min: float = 1e-4, rho_max: float = 24.0, route: str = "bessel") -> RadialKernel:
    """Tabulate a kernel on the default grid.

    Args:
        kind: "k_alpha", "k_zeta_alpha", "heat_complex" or "green_complex".
        n: complex dimension.
        alpha, zeta, t: kernel parameters (green_complex uses zeta as nu).
        rho_min, rho_max: table range.
        route: evaluation route for the potential kernels.
    """
    grid = default_grid(rho_min, rho_max)
    if kind == "k_alpha":
        vals = bgr_kernel(0.0, alpha, grid, n, route=route)
        params = {"n": n, "alpha": alpha}
    elif kind == "k_zeta_alpha":
        vals = bgr_kernel(zeta, alpha, grid, n, route=route)
        params = {"n": n, "alpha": alpha, "zeta": zeta}
    elif kind == "heat_complex":
        grid = grid[grid <= min(rho_max, 2.0 * n * t + 12.0 * math.sqrt(t) + 4.0)]
        vals = heat_complex(t, grid, n)
        params = {"n": n, "t": t}
    elif kind == "green_complex":
        vals = green_complex(zeta, grid, n)
        params = {"n": n, "nu": zeta}
    else:
        raise ParameterError(f"unknown kernel kind {kind!r}")
    return RadialKernel.from_table(kind, params, grid, vals)


# ---------------------------------------------------------------------------
# fits and bound checks


def fit_power(rho, vals) -> float:
    """Least-squares slope of log(vals) against log(rho)."""
    return float(np.polyfit(np.log(rho), np.log(vals), 1)[0])


def fit_decay(rho, vals, power: float | None = None) -> tuple[float, float]:
    """Fit log v = c + p log rho - q rho; returns (q, p). If power is given p is fixed."""
    rho = np.asarray(rho, dtype=float)
    lv = np.log(vals)
    if power is None:
        a = np.stack([np.ones_like(rho), np.log(rho), -rho], axis=1)
        c = np.linalg.lstsq(a, lv, rcond=None)[0]
        return float(c[2]), float(c[1])
    a = np.stack([np.ones_like(rho), -rho], axis=1)
    c = np.linalg.lstsq(a, lv - power * np.log(rho), rcond=None)[0]
    return float(c[1]), float(power)


def riesz_planar_ratio(alpha: float, beta: float, nodes: int = 64) -> tuple[float, float]:
    """Check the Euclidean Riesz composition identity in R^2 by quadrature.

    Computes I = int_{R^2} |x|^{alpha-2} |y-x|^{beta-2} dx at |y| = 1 and
    compares with gamma_2(alpha) gamma_2(beta) / gamma_2(alpha+beta). The
    plane is split by the bisector of 0 and y so that each half contains one
    singularity, integrated in polar coordinates about it.

    Returns:
        (quadrature value, closed-form value).
    """
    if not (0 < alpha and 0 < beta and alpha + beta < 2):
        raise ParameterError("need alpha, beta > 0 and alpha + beta < 2")
    x, w = np.polynomial.legendre.leggauss(nodes)

    def half(a, b):
        # int over {|x - y| > |x|} of |x|^{a-2} |x - y|^{b-2}
        def ang(r):
            th0 = np.arccos(min(1.0, 1.0 / (2.0 * r))) if r > 0.5 else 0.0
            th = th0 + (np.pi - th0) * 0.5 * (x + 1.0)
            d = np.sqrt(1.0 + r * r - 2.0 * r * np.cos(th))
            return 2.0 * (np.pi - th0) * 0.5 * np.dot(w, d ** (b - 2.0))

        def radial(r):
            return r ** (a - 1.0) * ang(r)

        v1 = integrate.quad(lambda u: radial(u**2) * 2 * u, 0.0, math.sqrt(0.5), epsabs=0, epsrel=1e-11, limit=200)[0]
        v2 = integrate.quad(radial, 0.5, 2.0, epsabs=0, epsrel=1e-11, limit=200)[0]
        # tail r > 2 via r = 1/u
        v3 = integrate.quad(lambda u: radial(1.0 / u) / u**2, 0.0, 0.5, epsabs=0, epsrel=1e-11, limit=200)[0]
        return v1 + v2 + v3

    num = half(alpha, beta) + half(beta, alpha)
    exact = specfun.riesz_gamma(2, alpha) * specfun.riesz_gamma(2, beta) / specfun.riesz_gamma(2, alpha + beta)
    return num, exact


def conv_bound_check(alpha: float, beta: float, zeta: float, n: int,
                     rho_small: float = 0.05, rho_large: float = 8.0,
                     fit_window=(2.0, 6.0), zeta_prime: float | None = None,
                     log_margin: float = 0.2) -> dict:
    """Small- and large-rho bounds for k_alpha * k_{zeta,beta}.

    The small-rho quantity is (k_alpha * k_{zeta,beta})(rho) gamma_{2n}(alpha+beta)
    rho^{2n-alpha-beta}, expected <= 1 + o(1). At large rho the convolution is
    compared with the larger of exp(-(zeta'+n) rho) and
    (rho^{alpha-2} e^{-n rho}) * k_{zeta,beta}, using a constant fitted on
    fit_window.

    Returns:
        Dict of metrics.
    """
    if not (0 < alpha < 3 and zeta > 0 and 0 < beta < 2 * n - alpha):
        raise ParameterError("need 0 < alpha < 3, zeta > 0 and 0 < beta < 2n - alpha")
    zp = zeta / 2.0 if zeta_prime is None else zeta_prime
    ka = kernel_table("k_alpha", n, alpha=alpha)
    kb = kernel_table("k_zeta_alpha", n, alpha=beta, zeta=zeta)
    conv_small = radial_convolution(ka, kb, n, rho_small)
    lead = conv_small * specfun.riesz_gamma(2 * n, alpha + beta) * rho_small ** (2 * n - alpha - beta)
    fit_rho = np.linspace(fit_window[0], fit_window[1], 5)
    rhos = np.append(fit_rho, rho_large)
    conv = radial_convolution(ka, kb, n, rhos)
    t1 = np.exp(-(zp + n) * rhos)
    prof = lambda r: r ** (alpha - 2.0) * np.exp(-n * r)  # noqa: E731
    t2 = radial_convolution(prof, kb, n, rhos)
    dom = np.maximum(t1, t2)
    const = float(np.max(conv[:-1] / dom[:-1]))
    excess = float(np.log(conv[-1]) - np.log(const * dom[-1]))
    return {
        "small_rho_leading_ratio": float(lead),
        "large_rho_log_excess": excess,
        "fitted_constant": const,
        "pass_small": bool(lead <= 1.1),
        "pass_large": bool(excess <= log_margin),
    }


def ball_volume_inverse(n: int, t):
    """Radius of the geodesic ball of volume t."""
    return np.arcsinh((2 * n * np.asarray(t, dtype=float) / sphere_area(2 * n - 1)) ** (1.0 / (2 * n)))


__all__ = [
    "MellinConfig", "RadialKernel", "abel_nodes", "ball_volume", "ball_volume_inverse",
    "bgr_kernel", "conv_bound_check", "table_coordinate", "table_radius", "d_gaussian", "d_gaussian_taylor", "default_grid",
    "derivative_terms", "fit_decay", "fit_power", "green_complex", "green_real",
    "green_real_mellin", "heat_complex", "heat_complex_scaled", "heat_real_even",
    "heat_real_odd", "kernel_table", "abel_inversion_check", "radial_factors", "radial_mass",
    "real_radial_convolution", "riesz_planar_ratio", "semigroup_defect", "series_terms",
]
