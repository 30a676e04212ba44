"""Decreasing rearrangements, Lorentz functionals and rearranged kernels.

Step functions are exact objects here: a rearrangement of weighted samples is
a sort, its running average is piecewise a + b/t, and Lorentz functionals of
a step function are integrated piece by piece. Radial kernels that decrease
in rho are rearranged through the ball-volume bijection t = |B_rho|.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import ParameterError, RangeError
from .geometry import composite_gauss, radial_convolution, sphere_area
from .kernels import ball_volume_inverse, kernel_table

__all__ = [
    "StepFunction",
    "WeightedSamples",
    "decreasing_rearrangement",
    "double_star",
    "l2_tail_check",
    "lorentz_norm",
    "oneil_pointwise_check",
    "radial_samples",
    "rearranged_kernel_bounds",
]


@dataclass(frozen=True)
class WeightedSamples:
    """Values with the measures of the sets they are taken on."""

    values: np.ndarray
    measures: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        m = np.asarray(self.measures, dtype=float).ravel()
        if v.shape != m.shape:
            raise ParameterError("values and measures must have equal length")
        if np.any(m <= 0) or not np.all(np.isfinite(m)):
            raise ParameterError("measures must be positive and finite")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "measures", m)

    @property
    def total(self) -> float:
        return float(np.sum(self.measures))

    def lp_norm(self, p: float) -> float:
        return float(np.sum(np.abs(self.values) ** p * self.measures) ** (1.0 / p))


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous step function on [0, inf), zero after the last break.

    values[i] holds on [breaks[i], breaks[i+1]); breaks[0] = 0.
    """

    breaks: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.breaks, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if b.ndim != 1 or len(b) != len(v) + 1:
            raise ParameterError("need len(breaks) == len(values) + 1")
        if len(b) and (b[0] != 0.0 or np.any(np.diff(b) <= 0)):
            raise ParameterError("breaks must start at 0 and increase")
        object.__setattr__(self, "breaks", b)
        object.__setattr__(self, "values", v)

    @property
    def support(self) -> float:
        return float(self.breaks[-1]) if len(self.breaks) else 0.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breaks, t, side="right") - 1
        ok = (idx >= 0) & (idx < len(self.values))
        padded = np.append(self.values, 0.0)
        out = np.where(ok, padded[np.clip(idx, 0, len(self.values))], 0.0)
        return out if out.ndim else float(out)

    def cumulative(self, t):
        """integral_0^t of the function."""
        t = np.asarray(t, dtype=float)
        if len(self.values) == 0:
            out = np.zeros_like(t)
            return out if out.ndim else float(out)
        widths = np.diff(self.breaks)
        cum = np.concatenate(([0.0], np.cumsum(widths * self.values)))
        tt = np.minimum(t, self.support)
        idx = np.clip(np.searchsorted(self.breaks, tt, side="right") - 1, 0, len(self.values) - 1)
        out = cum[idx] + self.values[idx] * (tt - self.breaks[idx])
        return out if out.ndim else float(out)

    def integral_power(self, p: float) -> float:
        return float(np.sum(np.abs(self.values) ** p * np.diff(self.breaks)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["t_breakpoint", "value"])
        for b, v in zip(self.breaks[:-1], self.values):
            wr.writerow([repr(float(b)), repr(float(v))])
        wr.writerow([repr(self.support), repr(0.0)])
        return buf.getvalue()


def decreasing_rearrangement(f: WeightedSamples) -> StepFunction:
    """Non-increasing rearrangement of |f| as an exact step function.

    Equal values are merged into one step.
    """
    a = np.abs(f.values)
    keep = a > 0
    a, m = a[keep], f.measures[keep]
    if a.size == 0:
        return StepFunction(np.array([0.0]), np.array([]))
    order = np.argsort(-a, kind="stable")
    a, m = a[order], m[order]
    new = np.concatenate(([True], a[1:] != a[:-1]))
    starts = np.flatnonzero(new)
    vals = a[starts]
    meas = np.add.reduceat(m, starts)
    return StepFunction(np.concatenate(([0.0], np.cumsum(meas))), vals)


class DoubleStar:
    """f**(t) = (1/t) integral_0^t f*, exact on each step as v + D/t."""

    def __init__(self, fstar: StepFunction):
        self.fstar = fstar
        widths = np.diff(fstar.breaks)
        self._cum = np.concatenate(([0.0], np.cumsum(widths * fstar.values)))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0):
            raise ParameterError("f** is defined for t > 0")
        out = self.fstar.cumulative(t) / t
        return out if out.ndim else float(out)

    def pieces(self):
        """(a, b, v, D) with f** = v + D/t on [a, b); the last piece extends to inf with v = 0."""
        fs = self.fstar
        out = []
        for i, v in enumerate(fs.values):
            a = fs.breaks[i]
            out.append((a, fs.breaks[i + 1], v, self._cum[i] - v * a))
        out.append((fs.support, math.inf, 0.0, self._cum[-1]))
        return out


def double_star(fstar: StepFunction) -> DoubleStar:
    return DoubleStar(fstar)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def _piece_integral(func, a: float, b: float) -> float:
    """Gauss-Legendre on [a, b], split geometrically when b/a is large."""
    if a == 0.0:
        raise ParameterError("piece must start at t > 0")
    edges = [a]
    while edges[-1] * 4.0 < b:
        edges.append(edges[-1] * 4.0)
    edges.append(b)
    tot = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        t = 0.5 * (lo + hi) + 0.5 * (hi - lo) * _GL_X
        tot += 0.5 * (hi - lo) * float(np.dot(_GL_W, func(t)))
    return tot


def lorentz_norm(f, p: float, q: float, starred: bool = False) -> float:
    """Lorentz functional ||f||_{p,q} (or ||f||*_{p,q} with f** in place of f*).

    Args:
        f: WeightedSamples or an already rearranged StepFunction.
        p: 1 < p < inf.
        q: 1 <= q <= inf (math.inf accepted).
        starred: use the running average f**.

    Returns:
        (integral_0^inf (t^{1/p} g(t))^q dt/t)^{1/q}, or sup_t t^{1/p} g(t) for q = inf.
    """
    if not 1.0 < p < math.inf:
        raise RangeError("need 1 < p < inf")
    if not 1.0 <= q:
        raise RangeError("need q >= 1")
    fs = f if isinstance(f, StepFunction) else decreasing_rearrangement(f)
    if len(fs.values) == 0:
        return 0.0
    if not starred:
        b = fs.breaks
        if q == math.inf:
            return float(np.max(fs.values * b[1:] ** (1.0 / p)))
        s = q / p
        return float(np.sum(fs.values**q * (p / q) * (b[1:] ** s - b[:-1] ** s)) ** (1.0 / q))
    pieces = double_star(fs).pieces()
    if q == math.inf:
        best = 0.0
        for a, b, v, d in pieces:
            cands = [b] if math.isfinite(b) else []
            if a > 0:
                cands.append(a)
            if v > 0 and d > 0:
                tc = d * (p - 1.0) / v
                if a < tc < b:
                    cands.append(tc)
            for t in cands:
                best = max(best, t ** (1.0 / p) * (v + d / t))
        # first piece has d = 0 and is increasing up to its right end
        return float(best)
    total = 0.0
    for a, b, v, d in pieces:
        if a == 0.0:
            # f** is constant v on the first step
            total += v**q * (p / q) * b ** (q / p)
        elif not math.isfinite(b):
            # f** = d/t: integral_a^inf d^q t^{q/p - q - 1} dt
            total += d**q * a ** (q / p - q) / (q - q / p)
        else:
            total += _piece_integral(lambda t: (t ** (1.0 / p) * (v + d / t)) ** q / t, a, b)
    return float(total ** (1.0 / q))


# ---------------------------------------------------------------------------
# radial profiles on the complex ball


def radial_samples(profile, n: int, rho_max: float, panels: int = 64, order: int = 8) -> WeightedSamples:
    """Sample a radial profile at Gauss nodes with their shell volumes."""
    r, w = composite_gauss(0.0, rho_max, panels, order)
    vol = w * sphere_area(2 * n - 1) * np.sinh(r) ** (2 * n - 1) * np.cosh(r)
    return WeightedSamples(profile(r), vol)


def _is_nonincreasing(profile, rho_max: float, tol: float = 1e-12) -> bool:
    r = np.linspace(1e-6, rho_max, 400)
    v = profile(r)
    return bool(np.all(np.diff(v) <= tol * np.maximum(np.abs(v[:-1]), 1e-300)))


def _ball_integral(profile, n: int, a: float, b: float, panels: int = 24, order: int = 16) -> float:
    """integral over a <= rho <= b of profile dV on B^n."""
    if b <= a:
        return 0.0
    r, w = composite_gauss(a, b, panels, order)
    return float(np.sum(w * profile(r) * sphere_area(2 * n - 1) * np.sinh(r) ** (2 * n - 1) * np.cosh(r)))


def oneil_pointwise_check(f, g, n: int, t_values, support: float, rho_max: float | None = None) -> dict:
    """O'Neil's bound u*(t) <= t^{-1} int_0^t f* int_0^t g* + int_t^inf f* g* for u = f * g.

    f and g are nonnegative, nonincreasing radial profiles vanishing beyond
    `support`; their rearrangements are exact reparametrizations by ball
    volume, and so is that of u once u is checked to be nonincreasing.

    Returns:
        Dict with per-t left side, right side and slack, and overall pass flag.
    """
    rho_max = rho_max or 2.0 * support
    for prof in (f, g):
        if not _is_nonincreasing(prof, support):
            raise ParameterError("profiles must be nonincreasing")
    probe = np.linspace(0.05, 2.0 * support, 12)
    u_probe = radial_convolution(f, g, n, probe, r_max=rho_max)
    monotone = bool(np.all(np.diff(u_probe) <= 1e-10 * np.max(np.abs(u_probe)) + 0.0))
    rows = []
    for t in t_values:
        rt = float(ball_volume_inverse(n, t))
        lhs = float(radial_convolution(f, g, n, rt, r_max=rho_max))
        fi = _ball_integral(f, n, 0.0, min(rt, support))
        gi = _ball_integral(g, n, 0.0, min(rt, support))
        tail = _ball_integral(lambda r: f(r) * g(r), n, rt, support) if rt < support else 0.0
        rhs = fi * gi / t + tail
        rows.append({"t": float(t), "rho": rt, "lhs": lhs, "rhs": rhs, "slack": rhs - lhs})
    return {
        "rows": rows,
        "u_nonincreasing": monotone,
        "pass": bool(monotone and all(r["slack"] >= 0 for r in rows)),
    }


def rearranged_kernel_bounds(kind: str, params: dict, t_small, t_large=None) -> dict:
    """Rearranged kernel values and their small- and large-t laws.

    kind is "k_zeta_alpha", "k_alpha" or "conv" (k_a * k_{zeta,b}). The
    rearrangement of a nonincreasing radial kernel is K(rho(t)) with
    |B_rho(t)| = t. The small-t quantity is
    K*(t) gamma_{2n}(s) (2nt/omega_{2n-1})^{(2n-s)/2n} with s the total order,
    whose limit is 1. The large-t exponent is fitted from
    log K* = c + e log t + l log log t.

    Args:
        kind: kernel kind.
        params: n, alpha, zeta and for "conv" also beta (order of the second factor).
        t_small: sample times for the leading constant.
        t_large: sample times for the decay fit (default 1e6..1e14).

    Returns:
        Dict of metrics.
    """
    n = int(params["n"])
    alpha = float(params["alpha"])
    zeta = float(params.get("zeta", 0.0))
    omega = sphere_area(2 * n - 1)
    if kind == "k_zeta_alpha":
        tab = kernel_table("k_zeta_alpha", n, alpha=alpha, zeta=zeta)
        kern, order = tab, alpha
    elif kind == "k_alpha":
        tab = kernel_table("k_alpha", n, alpha=alpha)
        kern, order = tab, alpha
        zeta = 0.0
    elif kind == "conv":
        beta = float(params["beta"])
        ka = kernel_table("k_alpha", n, alpha=alpha)
        kb = kernel_table("k_zeta_alpha", n, alpha=beta, zeta=zeta)
        kern = lambda r: radial_convolution(ka, kb, n, r)  # noqa: E731
        order = alpha + beta
    else:
        raise ParameterError(f"unknown kind {kind!r}")
    if not order < 2 * n:
        raise ParameterError("total order must be below 2n")
    t_small = np.asarray(t_small, dtype=float)
    vals = np.asarray(kern(ball_volume_inverse(n, t_small)), dtype=float)
    lead = vals * specfun.riesz_gamma(2 * n, order) * (2 * n * t_small / omega) ** ((2 * n - order) / (2 * n))
    out = {"t_small": t_small.tolist(), "values": vals.tolist(), "leading_ratio": lead.tolist()}
    if t_large is None:
        t_large = np.geomspace(1e6, 1e14, 9)
    t_large = np.asarray(t_large, dtype=float)
    vl = np.asarray(kern(ball_volume_inverse(n, t_large)), dtype=float)
    lt = np.log(t_large)
    a = np.stack([np.ones_like(lt), lt, np.log(lt)], axis=1)
    coef = np.linalg.lstsq(a, np.log(vl), rcond=None)[0]
    out["large_t_exponent_free"] = float(coef[1])
    out["large_t_logpower_free"] = float(coef[2])
    if kind != "conv":
        # stated laws: t^{-1/2 - zeta/2n} (log t)^{(alpha-2)/2}, and (log t)^{alpha-2} when zeta = 0
        logpow = (alpha - 2.0) / 2.0 if kind == "k_zeta_alpha" else alpha - 2.0
        a2 = np.stack([np.ones_like(lt), lt], axis=1)
        fixed = np.linalg.lstsq(a2, np.log(vl) - logpow * np.log(lt), rcond=None)[0]
        out["large_t_exponent_fixed_log"] = float(fixed[1])
        out["predicted_exponent"] = -0.5 - zeta / (2.0 * n)
        out["predicted_logpower"] = logpow
    return out


def l2_tail_check(alpha: float, beta: float, zeta: float, n: int, c: float,
                  rho_max: float = 12.0, panels: int = 12, order: int = 8) -> dict:
    """integral_c^inf |[k_alpha * k_{zeta,beta}]*(t)|^2 dt.

    The convolution is evaluated at Gauss nodes on [rho(c), rho_max]; beyond
    rho_max a tail model C rho^p e^{-n rho}, fitted on the last table
    stretch, is integrated exactly in the volume density.

    Returns:
        Dict with the value, its table and tail parts and the fitted tail power.
    """
    if not (0 < alpha < 1.5 and 0 < beta < 2 * n - alpha and zeta > 0):
        raise ParameterError("need 0 < alpha < 3/2, 0 < beta < 2n - alpha, zeta > 0")
    if c <= 0:
        raise ParameterError("c must be positive")
    ka = kernel_table("k_alpha", n, alpha=alpha)
    kb = kernel_table("k_zeta_alpha", n, alpha=beta, zeta=zeta)
    r0 = float(ball_volume_inverse(n, c))
    if r0 >= rho_max:
        raise ParameterError("rho_max must exceed the radius of the ball of volume c")
    r, w = composite_gauss(r0, rho_max, panels, order)
    vals = radial_convolution(ka, kb, n, r)
    dens = sphere_area(2 * n - 1) * np.sinh(r) ** (2 * n - 1) * np.cosh(r)
    body = float(np.sum(w * vals**2 * dens))
    # tail model with the known rate e^{-n rho}
    fit_r = np.linspace(rho_max - 3.0, rho_max, 4)
    fit_v = radial_convolution(ka, kb, n, fit_r)
    lv = np.log(fit_v) + n * fit_r
    p, logc = np.polyfit(np.log(fit_r), lv, 1)
    if not 2 * p < -1:
        raise ParameterError(f"tail power {p:.3f} makes the L2 tail diverge")
    # integral_R^inf C^2 rho^{2p} e^{-2n rho} omega sinh^{2n-1} cosh d rho
    tr, tw = composite_gauss(0.0, 1.0, 32, 16)
    # rho = R / u maps (0, 1] onto [R, inf)
    rr = rho_max / tr
    jac = rho_max / tr**2
    dens_scaled = sphere_area(2 * n - 1) * (0.5 * (1 - np.exp(-2 * rr))) ** (2 * n - 1) * 0.5 * (1 + np.exp(-2 * rr))
    tail = float(np.sum(tw * jac * np.exp(2 * logc) * rr ** (2 * p) * dens_scaled))
    return {"value": body + tail, "table_part": body, "tail_part": tail,
            "tail_power": float(p), "rho_start": r0, "rho_max": rho_max}
