"""Finite-difference differential operators on the ball and the Siegel domain.

Ball lattices use interleaved real coordinates (x_1, y_1, ..., x_n, y_n).
Siegel lattices use (x_1, y_1, ..., x_{n-1}, y_{n-1}, t, rho), where
w_j = x_j + i y_j for j < n and w_n = t + i (rho + |w'|^2).

Every operator takes a GridFunction and returns one on the lattice trimmed by
half the stencil width, so compositions shrink the lattice step by step and
the value at the lattice centre is what a caller evaluates.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (DomainError, GridMismatchError, ParameterError,
                     StencilError, ZeroNormError)
from .geometry import (BallPoint, GridFunction, QuadratureGrid, cayley_inverse_c,
                       composite_gauss, distance_c, random_ball_points)

__all__ = [
    "EigenParams",
    "OperatorSpec",
    "StencilConfig",
    "apply_R",
    "apply_Rbar",
    "ball_coords",
    "ball_points",
    "complex_hessian",
    "eigenfunction",
    "eigenfunction_c",
    "factor_product",
    "factorization_rhs",
    "geller_prime",
    "heisenberg_fields",
    "heisenberg_ops",
    "laplace_beltrami_ball",
    "laplace_beltrami_siegel",
    "lattice_eigenfunction",
    "radial_laplacian",
    "random_bump",
    "random_gaussian",
    "random_polynomial",
    "rayleigh_quotient",
    "rayleigh_quotient_radial",
    "rotation",
    "siegel_factor",
    "siegel_to_ball",
    "verify_base_case",
    "verify_factorization",
    "verify_intertwining",
    "wide_bump",
]

EPS_FLOOR = 1e-8
# a composition of `depth` second-order stencils amplifies rounding by about (4/h^2)^depth
ROUNDING_FACTOR = 10.0 * np.finfo(float).eps


def rounding_level(h: float, depth: int) -> float:
    """Relative residual below which no convergence order can be observed."""
    return ROUNDING_FACTOR * (4.0 / h ** 2) ** depth

_D1 = {2: np.array([-1.0, 0.0, 1.0]) / 2.0,
       4: np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0}
_D2 = {2: np.array([1.0, -2.0, 1.0]),
       4: np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0}


@dataclass(frozen=True)
class OperatorSpec:
    """One factor of the factorized product.

    Args:
        model: "ball" or "siegel".
        a: real shift parameter.
        k: number of factors.
        j: factor index in 1..k.
    """

    model: str
    a: float
    k: int
    j: int = 1

    def __post_init__(self):
        if self.model not in ("ball", "siegel"):
            raise ParameterError(f"unknown model {self.model!r}")
        if self.k < 1:
            raise ParameterError("k must be at least 1")
        if not 1 <= self.j <= self.k:
            raise ParameterError("need 1 <= j <= k")

    @property
    def m(self) -> int:
        """Coefficient k + 1 - 2j of the first-order part."""
        return self.k + 1 - 2 * self.j

    @property
    def shift(self) -> float:
        """The value a - k + 2j - 2 squared in the right-hand factor."""
        return self.a - self.k + 2 * self.j - 2


@dataclass(frozen=True)
class EigenParams:
    """Spectral parameter and boundary direction of a plane-wave eigenfunction."""

    lam: float
    zeta_dir: tuple

    def __post_init__(self):
        z = tuple(complex(v) for v in np.ravel(self.zeta_dir))
        object.__setattr__(self, "zeta_dir", z)
        if abs(np.linalg.norm(np.array(z)) - 1.0) > 1e-14:
            raise ParameterError("zeta_dir must be a unit vector")


@dataclass(frozen=True)
class StencilConfig:
    """Stencil order, mesh spacing and whether to extrapolate over h, h/2."""

    order: int = 4
    h: float = 0.04
    richardson: bool = True

    def __post_init__(self):
        if self.order not in (2, 4):
            raise ParameterError("order must be 2 or 4")
        if not self.h > 0:
            raise ParameterError("h must be positive")

    @property
    def width(self) -> int:
        return self.order // 2


# ---------------------------------------------------------------------------
# stencils


class _Stencil:
    """Partial derivatives of one GridFunction on its trimmed lattice."""

    def __init__(self, f: GridFunction, order: int = 4):
        if order not in _D1:
            raise ParameterError("order must be 2 or 4")
        self.f = f
        self.order = order
        self.w = order // 2
        if any(m <= 2 * self.w for m in f.shape):
            raise StencilError("stencil leaves the lattice")
        self.out = f.trim(self.w)
        self._nb = len(f.batch_shape)
        self._cache = {}

    def _apply(self, v, axis, coefs):
        pos = self._nb + axis
        m = v.shape[pos]
        w = self.w
        acc = 0.0
        for i, c in enumerate(coefs):
            if c == 0:
                continue
            sl = [slice(None)] * v.ndim
            sl[pos] = slice(i, m - 2 * w + i)
            acc = acc + c * v[tuple(sl)]
        return acc

    def _crop(self, v, skip):
        w = self.w
        sl = [slice(None)] * v.ndim
        for ax in range(self.f.dim):
            if ax not in skip:
                sl[self._nb + ax] = slice(w, -w)
        return v[tuple(sl)]

    @property
    def value(self) -> np.ndarray:
        return self.out.values

    def coord(self, axis: int) -> np.ndarray:
        return self.out.coord(axis)

    def d1(self, i: int) -> np.ndarray:
        key = (i,)
        if key not in self._cache:
            v = self._apply(self.f.values, i, _D1[self.order]) / self.f.h[i]
            self._cache[key] = self._crop(v, {i})
        return self._cache[key]

    def d2(self, i: int, j: int) -> np.ndarray:
        i, j = min(i, j), max(i, j)
        key = (i, j)
        if key not in self._cache:
            if i == j:
                v = self._apply(self.f.values, i, _D2[self.order]) / self.f.h[i] ** 2
                v = self._crop(v, {i})
            else:
                v = self._apply(self.f.values, i, _D1[self.order]) / self.f.h[i]
                v = self._apply(v, j, _D1[self.order]) / self.f.h[j]
                v = self._crop(v, {i, j})
            self._cache[key] = v
        return self._cache[key]

    def result(self, values) -> GridFunction:
        return self.out.with_values(values)


def _ball_n(f: GridFunction) -> int:
    if f.dim % 2:
        raise GridMismatchError("ball lattices need an even number of axes")
    return f.dim // 2


def ball_coords(coords) -> list:
    """Complex coordinates z_j from interleaved real coordinate arrays."""
    return [coords[2 * j] + 1j * coords[2 * j + 1] for j in range(len(coords) // 2)]


def ball_points(coords) -> np.ndarray:
    """Stack interleaved real coordinate arrays into complex points (last axis n)."""
    return np.stack(np.broadcast_arrays(*ball_coords(coords)), axis=-1)


def _norm2(coords) -> np.ndarray:
    return sum(c * c for c in coords)


# ---------------------------------------------------------------------------
# ball model


def _dz(s: _Stencil, j: int):
    return 0.5 * (s.d1(2 * j) - 1j * s.d1(2 * j + 1))


def _dzbar(s: _Stencil, j: int):
    return 0.5 * (s.d1(2 * j) + 1j * s.d1(2 * j + 1))


def _ddbar(s: _Stencil, j: int, k: int):
    """d^2 / dz_j dzbar_k."""
    xj, yj, xk, yk = 2 * j, 2 * j + 1, 2 * k, 2 * k + 1
    return 0.25 * (s.d2(xj, xk) + 1j * s.d2(xj, yk) - 1j * s.d2(yj, xk) + s.d2(yj, yk))


def apply_R(f: GridFunction, order: int = 4) -> GridFunction:
    """Holomorphic Euler operator R = sum z_j d/dz_j."""
    s = _Stencil(f, order)
    z = ball_coords([s.coord(i) for i in range(f.dim)])
    return s.result(sum(z[j] * _dz(s, j) for j in range(_ball_n(f))))


def apply_Rbar(f: GridFunction, order: int = 4) -> GridFunction:
    """Antiholomorphic Euler operator sum conj(z_j) d/dzbar_j."""
    s = _Stencil(f, order)
    z = ball_coords([s.coord(i) for i in range(f.dim)])
    return s.result(sum(np.conj(z[j]) * _dzbar(s, j) for j in range(_ball_n(f))))


def rotation(f: GridFunction, order: int = 4) -> GridFunction:
    """R - Rbar, the generator of z -> e^{i theta} z (up to a factor i)."""
    s = _Stencil(f, order)
    z = ball_coords([s.coord(i) for i in range(f.dim)])
    n = _ball_n(f)
    return s.result(sum(z[j] * _dz(s, j) - np.conj(z[j]) * _dzbar(s, j) for j in range(n)))


def complex_hessian(f: GridFunction, j: int, k: int, order: int = 4) -> GridFunction:
    """d^2 f / dz_j dzbar_k."""
    s = _Stencil(f, order)
    return s.result(_ddbar(s, j, k))


def _invariant_part(s: _Stencil, n: int):
    """sum (delta_jk - z_j conj(z_k)) d^2/dz_j dzbar_k and the coordinates."""
    z = ball_coords([s.coord(i) for i in range(2 * n)])
    acc = 0.0
    for j in range(n):
        for k in range(n):
            coef = (1.0 if j == k else 0.0) - z[j] * np.conj(z[k])
            acc = acc + coef * _ddbar(s, j, k)
    return acc, z


def laplace_beltrami_ball(f: GridFunction, order: int = 4) -> GridFunction:
    """Bergman Laplacian 4 (1 - |z|^2) sum (delta_jk - z_j conj z_k) d_j dbar_k."""
    n = _ball_n(f)
    s = _Stencil(f, order)
    acc, z = _invariant_part(s, n)
    r2 = sum(np.abs(zj) ** 2 for zj in z)
    return s.result(4.0 * (1.0 - r2) * acc)


def geller_prime(alpha: complex, beta: complex, f: GridFunction, order: int = 4) -> GridFunction:
    """sum (delta_jk - z_j conj z_k) d_j dbar_k f + alpha R f + beta Rbar f - alpha beta f."""
    n = _ball_n(f)
    s = _Stencil(f, order)
    acc, z = _invariant_part(s, n)
    rf = sum(z[j] * _dz(s, j) for j in range(n))
    rbf = sum(np.conj(z[j]) * _dzbar(s, j) for j in range(n))
    return s.result(acc + alpha * rf + beta * rbf - alpha * beta * s.value)


# ---------------------------------------------------------------------------
# Siegel model


def _siegel_n(f: GridFunction) -> int:
    if f.dim % 2:
        raise GridMismatchError("Siegel lattices need an even number of axes")
    return f.dim // 2


def _heis(s: _Stencil, n: int) -> dict:
    t_ax, r_ax = 2 * n - 2, 2 * n - 1
    lap = 0.0
    for j in range(n - 1):
        xa, ya = 2 * j, 2 * j + 1
        x, y = s.coord(xa), s.coord(ya)
        lap = lap + (s.d2(xa, xa) + s.d2(ya, ya) + 4.0 * y * s.d2(xa, t_ax)
                     - 4.0 * x * s.d2(ya, t_ax) + 4.0 * (x * x + y * y) * s.d2(t_ax, t_ax))
    return {
        "Delta_b": 0.25 * lap,
        "T": s.d1(t_ax),
        "TT": s.d2(t_ax, t_ax),
        "d_rho": s.d1(r_ax),
        "d_rhorho": s.d2(r_ax, r_ax),
        "rho": s.coord(r_ax),
    }


def heisenberg_ops(f: GridFunction, order: int = 4) -> dict:
    """Sub-Laplacian, T, d/drho and d^2/drho^2 of a Siegel-lattice function.

    Returns:
        dict of GridFunctions keyed Delta_b, T, d_rho, d_rhorho.
    """
    n = _siegel_n(f)
    s = _Stencil(f, order)
    ops = _heis(s, n)
    return {k: s.result(ops[k]) for k in ("Delta_b", "T", "d_rho", "d_rhorho")}


def heisenberg_fields(f: GridFunction, j: int = 0, order: int = 4) -> tuple:
    """X_j f and Y_j f with X_j = d/dx_j + 2 y_j d/dt, Y_j = d/dy_j - 2 x_j d/dt."""
    n = _siegel_n(f)
    if not 0 <= j < n - 1:
        raise ParameterError("field index out of range")
    s = _Stencil(f, order)
    t_ax = 2 * n - 2
    x, y = s.coord(2 * j), s.coord(2 * j + 1)
    xf = s.d1(2 * j) + 2.0 * y * s.d1(t_ax)
    yf = s.d1(2 * j + 1) - 2.0 * x * s.d1(t_ax)
    return s.result(xf), s.result(yf)


def siegel_factor(c: float, m: float, f: GridFunction, order: int = 4) -> GridFunction:
    """rho d_rho^2 + c d_rho + rho T^2 + Delta_b - i m T applied to f."""
    n = _siegel_n(f)
    s = _Stencil(f, order)
    o = _heis(s, n)
    rho = o["rho"]
    return s.result(rho * o["d_rhorho"] + c * o["d_rho"] + rho * o["TT"] + o["Delta_b"]
                    - 1j * m * o["T"])


def laplace_beltrami_siegel(f: GridFunction, order: int = 4) -> GridFunction:
    """4 rho [rho (d_rho^2 + T^2) + Delta_b - (n-1) d_rho] applied to f."""
    n = _siegel_n(f)
    s = _Stencil(f, order)
    o = _heis(s, n)
    rho = o["rho"]
    return s.result(4.0 * rho * (rho * (o["d_rhorho"] + o["TT"]) + o["Delta_b"]
                                 - (n - 1) * o["d_rho"]))


def siegel_to_ball(coords) -> np.ndarray:
    """Ball points (complex, last axis n) of Siegel lattice coordinates."""
    n = len(coords) // 2
    zp = [coords[2 * j] + 1j * coords[2 * j + 1] for j in range(n - 1)]
    t, rho = coords[2 * n - 2], coords[2 * n - 1]
    wn = t + 1j * (rho + sum(np.abs(v) ** 2 for v in zp))
    w = np.stack(np.broadcast_arrays(*zp, wn), axis=-1)
    return cayley_inverse_c(w)


# ---------------------------------------------------------------------------
# the factorization identity


def _weight(model: str, f: GridFunction, power: float) -> np.ndarray:
    coords = f.coords()
    if model == "ball":
        return (1.0 - _norm2(coords)) ** power
    return coords[-1] ** power


def _check_model(model: str, f: GridFunction):
    if model not in ("ball", "siegel"):
        raise ParameterError(f"unknown model {model!r}")
    if model == "ball" and np.any(_norm2(f.coords()) >= 1.0):
        raise DomainError("ball lattice leaves the unit ball")
    if model == "siegel" and np.any(f.coords()[-1] <= 0):
        raise DomainError("Siegel lattice reaches rho <= 0")


def factor_product(model: str, a: float, k: int, f: GridFunction, order: int = 4) -> GridFunction:
    """Apply the k first-order-twisted factors to weight * f, j = 1..k in turn.

    Siegel factor j: rho d_rho^2 + a d_rho + rho T^2 + Delta_b - i m T.
    Ball factor j: D'_{c,c} + m^2/4 - (m/2)(R - Rbar) with c = (1-a-n)/2.
    Here m = k + 1 - 2j and the weight is rho^{(k-n-a)/2} or (1-|z|^2)^{(k-n-a)/2}.
    The factors commute, so the order of application does not matter.
    """
    if k < 1:
        raise ParameterError("k must be at least 1")
    _check_model(model, f)
    n = f.dim // 2
    u = f * _weight(model, f, (k - n - a) / 2.0)
    for j in range(1, k + 1):
        m = k + 1 - 2 * j
        if model == "siegel":
            u = siegel_factor(a, m, u, order)
        else:
            c = (1.0 - a - n) / 2.0
            u = geller_prime(c, c, u, order) + (m * m / 4.0) * u.trim(order // 2) \
                - (m / 2.0) * rotation(u, order)
    return u


def factorization_rhs(model: str, a: float, k: int, f: GridFunction, order: int = 4) -> GridFunction:
    """4^{-k} weight' prod_j [Delta_B + n^2 - (a-k+2j-2)^2] f, weight' = rho^{-(k+n+a)/2} or (1-|z|^2)^{-(k+n+a)/2}."""
    _check_model(model, f)
    n = f.dim // 2
    lap = laplace_beltrami_ball if model == "ball" else laplace_beltrami_siegel
    u = f
    for j in range(1, k + 1):
        cj = a - k + 2 * j - 2
        u = lap(u, order) + (n * n - cj * cj) * u
    return u * (4.0 ** (-k) * _weight(model, u, -(k + n + a) / 2.0))


def _residual(lhs, rhs, floor, pointwise=True):
    scale = np.abs(rhs) if pointwise else np.max(np.abs(rhs))
    return np.abs(lhs - rhs) / (scale + floor)


def _pair_report(evaluate, cfg: StencilConfig, floor: float, depth: int,
                 pointwise: bool = False) -> dict:
    """Evaluate (lhs, rhs) centre values at h and h/2 and summarize convergence."""
    l1, r1 = evaluate(cfg.h)
    res1 = _residual(l1, r1, floor, pointwise)
    out = {"h": cfg.h, "order": cfg.order, "points": int(len(l1)),
           "raw_residual": float(res1.max())}
    if cfg.richardson:
        l2, r2 = evaluate(cfg.h / 2.0)
        res2 = _residual(l2, r2, floor, pointwise)
        p = 2.0 ** cfg.order
        le = (p * l2 - l1) / (p - 1.0)
        re = (p * r2 - r1) / (p - 1.0)
        ext = _residual(le, re, floor, pointwise)
        raw2 = float(res2.max())
        out["raw_residual_half"] = raw2
        out["ratio"] = float(res1.max() / raw2) if raw2 > 0 else math.inf
        out["rounding_level"] = bool(raw2 <= rounding_level(cfg.h / 2.0, depth))
        out["residual"] = float(ext.max())
    else:
        out["residual"] = out["raw_residual"]
    return out


def verify_factorization(model: str, a: float, k: int, func: Callable, centers,
                         cfg: StencilConfig | None = None, tol: float = 1e-5,
                         min_ratio: float = 12.0, floor: float = EPS_FLOOR) -> dict:
    """Compare both sides of the factorization at lattice centres.

    Args:
        model: "ball" or "siegel".
        a: shift parameter.
        k: number of factors.
        func: test function of a list of real coordinate arrays.
        centers: (P, 2n) evaluation points.
        cfg: stencil settings.
        tol: bound on the (extrapolated) residual relative to max |rhs| over
            the points; pointwise ratios blow up where rhs happens to vanish.
        min_ratio: required decrease of the raw residual under h -> h/2,
            waived when the residual at h/2 is already at rounding level
            (the stencils are exact on polynomials when the weight is).
        floor: added to the normalization of the relative residual.

    Returns:
        Report dict; "pass" combines the residual and ratio checks.
    """
    cfg = cfg or StencilConfig()
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    hw = k * cfg.width

    def evaluate(h):
        f = GridFunction.sample(func, centers, h, hw)
        return (factor_product(model, a, k, f, cfg.order).center_values(),
                factorization_rhs(model, a, k, f, cfg.order).center_values())

    rep = _pair_report(evaluate, cfg, floor, k)
    ok = rep["residual"] <= tol
    if cfg.richardson:
        ok = ok and (rep["ratio"] >= min_ratio or rep["rounding_level"])
    rep.update({"model": model, "a": a, "k": k, "tolerance": tol, "pass": bool(ok)})
    return rep


def _base_case_sides(model: str, a: float, f: GridFunction, order: int):
    n = f.dim // 2
    if model == "siegel":
        beta = (n - 1 + a) / 2.0
        lhs = siegel_factor(a, 0.0, f * _weight(model, f, -beta), order)
        lhs = lhs * _weight(model, lhs, beta + 1.0)
        s = _Stencil(f, order)
        o = _heis(s, n)
        rho = o["rho"]
        rhs = s.result(rho * (rho * (o["d_rhorho"] + o["TT"]) + o["Delta_b"]
                              - (2 * beta - a) * o["d_rho"]) + beta * (beta + 1 - a) * s.value)
        return lhs, rhs
    sp = (n + 1 - a) / 2.0
    lhs = geller_prime(sp - n, sp - n, f * _weight(model, f, sp - n), order)
    rhs = laplace_beltrami_ball(f, order) + 4.0 * sp * (n - sp) * f
    rhs = rhs * (0.25 * _weight(model, rhs, sp - n - 1.0))
    return lhs, rhs


def verify_base_case(model: str, a: float, func: Callable, centers,
                     cfg: StencilConfig | None = None, tol: float = 1e-5,
                     floor: float = EPS_FLOOR) -> dict:
    """Check the single-factor conjugation identities behind the k = 1 case.

    Siegel, beta = (n-1+a)/2:
        rho^{beta+1} D_a(rho^{-beta} f)
        = rho [rho (d_rho^2 + T^2) + Delta_b - (2 beta - a) d_rho] f + beta (beta+1-a) f.
    Ball, s = (n+1-a)/2:
        D'_{s-n,s-n}[(1-|z|^2)^{s-n} f] = 1/4 (1-|z|^2)^{s-n-1} [Delta_B + 4 s (n-s)] f.
    """
    cfg = cfg or StencilConfig()
    centers = np.atleast_2d(np.asarray(centers, dtype=float))

    def evaluate(h):
        f = GridFunction.sample(func, centers, h, cfg.width)
        _check_model(model, f)
        lhs, rhs = _base_case_sides(model, a, f, cfg.order)
        return lhs.center_values(), rhs.center_values()

    rep = _pair_report(evaluate, cfg, floor, 1)
    rep.update({"model": model, "a": a, "tolerance": tol, "pass": bool(rep["residual"] <= tol)})
    return rep


# ---------------------------------------------------------------------------
# intertwining relations


def _D(c, order):
    return lambda u: siegel_factor(c, 0.0, u, order)


def _T2(order):
    def op(u):
        s = _Stencil(u, order)
        return s.result(s.d2(u.dim - 2, u.dim - 2))
    return op


def _quad(op, c2, order):
    """u -> op(op(u)) + c2 T^2 u."""
    t2 = _T2(order)

    def q(u):
        return op(op(u)) + c2 * t2(u) if c2 else op(op(u))
    return q


def _chain(*ops):
    """Composition with the last operator applied first."""
    def run(u):
        for op in reversed(ops):
            u = op(u)
        return u
    return run


def _intertwining_ops(lemma: str, params: dict, order: int, literal: bool):
    """(lhs, rhs, second-order depth, model) for one named identity."""
    if lemma == "shift":
        a, beta = params["a"], params["beta"]
        lhs = _chain(_D(a + beta, order), _quad(_D(a - 1, order), (beta - 1) ** 2, order))
        rhs = _chain(_quad(_D(a, order), beta ** 2, order), _D(a + beta - 2, order))
        return lhs, rhs, 3, "siegel"
    if lemma == "even_product":
        a, k = params["a"], int(params["k"])
        inner = a if literal else a - 1
        lhs = _chain(_D(a + 2 * k, order),
                     *[_quad(_D(inner, order), (2 * j - 1) ** 2, order) for j in range(1, k + 1)])
        rhs = _chain(_D(a, order), *[_quad(_D(a, order), 4 * j * j, order) for j in range(1, k + 1)])
        return lhs, rhs, 2 * k + 1, "siegel"
    if lemma == "odd_product":
        a, k = params["a"], int(params["k"])
        inner = a if literal else a - 1
        outer = a + 2 * k if literal else a + 2 * k - 1
        lhs = _chain(_D(outer, order), _D(inner, order),
                     *[_quad(_D(inner, order), 4 * j * j, order) for j in range(1, k)])
        rhs = _chain(*[_quad(_D(a, order), (2 * j - 1) ** 2, order) for j in range(1, k + 1)])
        return lhs, rhs, 2 * k, "siegel"
    if lemma == "geller":
        a, l, n = params["a"], params["l"], int(params["n"])

        def gp(c):
            return lambda u: geller_prime(c, c, u, order)

        def bracket(c, q):
            def op(u):
                g = gp(c)
                first = g(g(u)) + 2 * q * g(u) + q * q * u
                rot = rotation(rotation(u, order), order)
                return first - q * rot
            return op

        lhs = _chain(gp((1 - a - n - l) / 2.0), bracket((2 - a - n) / 2.0, (l - 1) ** 2 / 4.0))
        rhs = _chain(bracket((1 - a - n) / 2.0, l * l / 4.0), gp((3 - a - n - l) / 2.0))
        return lhs, rhs, 3, "ball"
    raise ParameterError(f"unknown identity {lemma!r}")


def verify_intertwining(lemma: str, params: dict, func: Callable, centers,
                        cfg: StencilConfig | None = None, literal: bool = False,
                        tol: float = 1e-4, floor: float = EPS_FLOOR) -> dict:
    """Residual of (left composition - right composition) applied to func.

    Identities:
        shift: D_{a+b} (D_{a-1}^2 + (b-1)^2 T^2) = (D_a^2 + b^2 T^2) D_{a+b-2}.
        even_product: D_{a+2k} prod_j (D_{a-1}^2 + (2j-1)^2 T^2) = D_a prod_j (D_a^2 + 4j^2 T^2).
        odd_product: D_{a+2k-1} D_{a-1} prod_{j<k} (D_{a-1}^2 + 4j^2 T^2) = prod_j (D_a^2 + (2j-1)^2 T^2).
        geller: a commutation of Geller operators on the ball (params a, l, n).
    Here D_c = rho d_rho^2 + c d_rho + rho T^2 + Delta_b.

    Args:
        lemma: identity name.
        params: its parameters.
        func: test function of a list of real coordinate arrays.
        centers: (P, 2n) evaluation points.
        cfg: stencil settings.
        literal: for the product identities, use D_a in place of D_{a-1} inside
            the products (and D_{a+2k} outside the odd one). Those variants are
            false for k >= 1 and exist to exhibit the failure.
        tol: bound on max |lhs - rhs| / (max |rhs| + floor) over the points.
            The scale is the sup over points because low-degree polynomials
            can be annihilated, leaving rounding noise around zero.
        floor: added to the normalization.
    """
    cfg = cfg or StencilConfig()
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    lhs, rhs, depth, model = _intertwining_ops(lemma, params, cfg.order, literal)

    def evaluate(h):
        f = GridFunction.sample(func, centers, h, depth * cfg.width)
        _check_model(model, f)
        return lhs(f).center_values(), rhs(f).center_values()

    rep = _pair_report(evaluate, cfg, floor, depth)
    rep.update({"identity": lemma, "params": dict(params), "literal": literal,
                "model": model, "tolerance": tol, "pass": bool(rep["residual"] <= tol)})
    return rep


# ---------------------------------------------------------------------------
# test functions


def random_polynomial(rng: np.random.Generator, dim: int, degree: int = 4,
                      center=None) -> Callable:
    """Dense polynomial in (x - center) with N(0, 1) coefficients on every monomial up to degree."""
    exps = [e for e in itertools.product(range(degree + 1), repeat=dim) if sum(e) <= degree]
    coefs = rng.normal(size=len(exps))
    c0 = np.zeros(dim) if center is None else np.asarray(center, dtype=float)

    def f(coords):
        xs = [coords[i] - c0[i] for i in range(dim)]
        acc = 0.0
        for c, e in zip(coefs, exps):
            term = c
            for x, p in zip(xs, e):
                if p:
                    term = term * x ** p
            acc = acc + term
        return acc
    return f


def random_gaussian(rng: np.random.Generator, dim: int, center=None, spread: float = 0.2) -> Callable:
    """Anisotropic Gaussian exp(-sum c_i (x_i - m_i)^2) with c_i in [0.5, 2]."""
    c0 = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
    c = rng.uniform(0.5, 2.0, dim)
    m = c0 + rng.normal(0.0, spread, dim)
    return lambda coords: np.exp(-sum(c[i] * (coords[i] - m[i]) ** 2 for i in range(dim)))


# ---------------------------------------------------------------------------
# eigenfunctions and the spectral gap


def eigenfunction_c(z, lam: float, zeta) -> np.ndarray:
    """((1 - |z|^2) / |1 - (z, zeta)|^2)^{(n + i lam)/2} on complex arrays (last axis n)."""
    z = np.asarray(z, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    n = z.shape[-1]
    r2 = np.sum(np.abs(z) ** 2, axis=-1)
    pair = np.sum(z * np.conj(zeta), axis=-1)
    base = (1.0 - r2) / np.abs(1.0 - pair) ** 2
    return np.exp((n + 1j * lam) / 2.0 * np.log(base))


def eigenfunction(p: BallPoint, params: EigenParams, n: int) -> complex:
    """Plane wave e_{lam,zeta}(z), an eigenfunction of the Bergman Laplacian with eigenvalue -(n^2 + lam^2)."""
    if p.n != n or len(params.zeta_dir) != n:
        raise ParameterError("dimension mismatch")
    return complex(eigenfunction_c(p.z, params.lam, params.zeta_dir))


def lattice_eigenfunction(params: EigenParams, model: str = "ball") -> Callable:
    """e_{lam,zeta} as a function of lattice coordinates, pulled back to the Siegel model if asked."""
    to_ball = ball_points if model == "ball" else siegel_to_ball
    return lambda coords: eigenfunction_c(to_ball(coords), params.lam, params.zeta_dir)


def radial_laplacian(f, df, d2f, rho, n: int):
    """Bergman Laplacian of a radial function: f'' + ((2n-1) coth rho + tanh rho) f'."""
    rho = np.asarray(rho, dtype=float)
    return d2f(rho) + ((2 * n - 1) / np.tanh(rho) + np.tanh(rho)) * df(rho)


def _grad_energy(func, pts: np.ndarray, h: float) -> tuple:
    """Values and 4 (1-|z|^2)(sum |d_j f|^2 - |sum z_j d_j f|^2) by central differences."""
    n = pts.shape[-1]
    vals = np.asarray(func(pts), dtype=float)
    dz = []
    for j in range(n):
        parts = []
        for unit in (1.0, 1j):
            e = np.zeros(n, dtype=complex)
            e[j] = unit
            st = [np.asarray(func(pts + s * h * e), dtype=float) for s in (-2, -1, 1, 2)]
            parts.append((st[0] - 8 * st[1] + 8 * st[2] - st[3]) / (12 * h))
        dz.append(0.5 * (parts[0] - 1j * parts[1]))
    dz = np.stack(dz, axis=-1)
    r2 = np.sum(np.abs(pts) ** 2, axis=-1)
    rad = np.sum(pts * dz, axis=-1)
    dens = 4.0 * (1.0 - r2) * (np.sum(np.abs(dz) ** 2, axis=-1) - np.abs(rad) ** 2)
    return vals, dens


def rayleigh_quotient(func, grid: QuadratureGrid, h: float = 1e-4) -> float:
    """Dirichlet quotient int |grad f|^2 dV / int f^2 dV on a quadrature grid.

    The energy form equals int f (-Delta_B f) dV for compactly supported f and
    needs only first derivatives, taken by 4th-order central differences.

    Args:
        func: real function of complex points (N, n), supported inside the grid.
        grid: quadrature grid.
        h: difference step in each real coordinate.
    """
    pts = grid.points
    vals, dens = _grad_energy(func, pts, h)
    vol = grid.volumes
    mass = float(np.dot(vol, vals ** 2))
    if not mass > 0:
        raise ZeroNormError("function vanishes on the grid")
    return float(np.dot(vol, dens)) / mass


def rayleigh_quotient_radial(profile, dprofile, n: int, rho_max: float,
                             panels: int = 200, order: int = 16) -> float:
    """Dirichlet quotient of a radial function via the 1-D volume density sinh^{2n-1} cosh."""
    r, w = composite_gauss(0.0, rho_max, panels, order)
    dens = w * np.sinh(r) ** (2 * n - 1) * np.cosh(r)
    mass = float(np.dot(dens, profile(r) ** 2))
    if not mass > 0:
        raise ZeroNormError("profile vanishes")
    return float(np.dot(dens, dprofile(r) ** 2)) / mass


def random_bump(rng: np.random.Generator, n: int, max_center: float = 1.0,
                radii=(0.6, 1.5)) -> Callable:
    """Sum of 1-3 bumps (1 - (d/R)^2)^4_+ in geodesic balls, random centres, radii and signs.

    Supported in the geodesic ball of radius max_center + radii[1] about 0.
    """
    count = int(rng.integers(1, 4))
    centers = random_ball_points(n, count, rng, max_radius=math.tanh(max_center))
    rad = rng.uniform(radii[0], radii[1], count)
    coef = rng.normal(size=count)

    def f(z):
        acc = 0.0
        for c, p, r in zip(coef, centers, rad):
            s = np.minimum(distance_c(z, p) / r, 1.0)
            acc = acc + c * (1.0 - s * s) ** 4
        return acc
    return f


def wide_bump(n: int, radius: float) -> tuple:
    """(1 + rho) e^{-n rho} with a smooth cutoff on [radius/2, radius], and its derivative.

    As the radius grows its Dirichlet quotient decreases to n^2.
    """
    def parts(r):
        r = np.asarray(r, dtype=float)
        s = np.clip(2.0 * r / radius - 1.0, 0.0, 1.0)
        inside = (s > 0) & (s < 1)
        q = np.where(inside, 1.0 - s * s, 1.0)
        chi = np.where(s >= 1, 0.0, np.where(inside, np.exp(1.0 - 1.0 / q), 1.0))
        dchi = np.where(inside, chi * (-2.0 * s / q ** 2) * (2.0 / radius), 0.0)
        g = (1.0 + r) * np.exp(-n * r)
        dg = (1.0 - n * (1.0 + r)) * np.exp(-n * r)
        return g, dg, chi, dchi

    def profile(r):
        g, _, chi, _ = parts(r)
        return g * chi

    def dprofile(r):
        g, dg, chi, dchi = parts(r)
        return dg * chi + g * dchi
    return profile, dprofile


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, default=str)
