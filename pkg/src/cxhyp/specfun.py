"""Special functions and closed-form constants.

Gamma is evaluated with a fixed Lanczos-type rational approximation, the
hypergeometric series by direct summation with explicit tail control, and
the sharp constants in log space so that large Gamma ratios never overflow.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DivergenceError, DomainError, ParameterError, RangeError

__all__ = [
    "SeriesConfig",
    "ConstantEntry",
    "ConstantsTable",
    "gamma_fn",
    "log_gamma",
    "pochhammer",
    "gauss_2f1",
    "gen_3f2_at1",
    "jacobi_poly",
    "sphere_area",
    "sobolev_constant",
    "adams_beta0",
    "riesz_gamma",
    "beta_frac",
    "constants",
]

# Lanczos-type coefficients (g = 671/128, 14 terms).
_LANCZOS_G = 671.0 / 128.0
_LANCZOS_C0 = 0.999999999999997092
_LANCZOS = (
    57.1562356658629235,
    -59.5979603554754912,
    14.1360979747417471,
    -0.491913816097620199,
    0.339946499848118887e-4,
    0.465236289270485756e-4,
    -0.983744753048795646e-4,
    0.158088703224912494e-3,
    -0.210264441724104883e-3,
    0.217439618115212643e-3,
    -0.164318106536763890e-3,
    0.844182239838527433e-4,
    -0.261908384015814087e-4,
    0.368991826595316234e-5,
)
_SQRT_2PI = 2.5066282746310005


@dataclass(frozen=True)
class SeriesConfig:
    """Truncation controls for series evaluation.

    Args:
        rel_tol: relative tolerance at which summation stops.
        max_terms: hard cap on the number of terms.
    """

    rel_tol: float = 1e-15
    max_terms: int = 200_000

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-3):
            raise ParameterError("rel_tol must lie in (0, 1e-3]")
        if self.max_terms < 64:
            raise ParameterError("max_terms must be at least 64")


def _lanczos_lgamma(x: float) -> float:
    y = x
    ser = _LANCZOS_C0
    for c in _LANCZOS:
        y += 1.0
        ser += c / y
    tmp = x + _LANCZOS_G
    return (x + 0.5) * math.log(tmp) - tmp + math.log(_SQRT_2PI * ser / x)


def log_gamma(x: float) -> float:
    """Natural log of Gamma for x > 0.

    Args:
        x: positive real argument.

    Returns:
        log Gamma(x).
    """
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    return _lanczos_lgamma(x)


def _gamma_scalar(x: float) -> float:
    if not x > 0.0:
        raise DomainError(f"gamma_fn needs x > 0, got {x}")
    if x == math.floor(x) and x <= 171:
        return float(math.factorial(int(x) - 1))
    if x < 1.0:
        # the approximation is tuned for x >= 1; shift once
        return math.exp(_lanczos_lgamma(x + 1.0)) / x
    return math.exp(_lanczos_lgamma(x))


def gamma_fn(x):
    """Gamma function on the positive half-line.

    Args:
        x: real scalar or array, every entry > 0.

    Returns:
        Gamma(x), same shape as the input.
    """
    if np.ndim(x) == 0:
        return _gamma_scalar(float(x))
    arr = np.asarray(x, dtype=float)
    return np.vectorize(_gamma_scalar, otypes=[float])(arr)


def _signed_lgamma(x: float) -> tuple[float, float]:
    """(log|Gamma(x)|, sign) for any real x that is not a pole.

    A pole returns (-inf, 0.0), the convention for 1/Gamma = 0.
    """
    if x > 0:
        return _lanczos_lgamma(x + 1.0) - math.log(x) if x < 1.0 else _lanczos_lgamma(x), 1.0
    if x == math.floor(x):
        return -math.inf, 0.0
    # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    s = math.sin(math.pi * x)
    lg, _ = _signed_lgamma(1.0 - x)
    return math.log(math.pi / abs(s)) - lg, math.copysign(1.0, s)


def pochhammer(a: float, k: int) -> float:
    """Rising factorial (a)_k = a (a+1) ... (a+k-1), with (a)_0 = 1."""
    if k < 0 or int(k) != k:
        raise ParameterError("k must be a nonnegative integer")
    out = 1.0
    for i in range(int(k)):
        out *= a + i
    return out


def _is_nonpos_int(c: float) -> bool:
    return c <= 0 and c == math.floor(c)


def gauss_2f1(a: float, b: float, c: float, z: float, cfg: SeriesConfig | None = None) -> float:
    """Gauss hypergeometric function by its power series.

    Args:
        a, b, c: real parameters, c not a non-positive integer.
        z: real argument with |z| < 1, or z = 1 when c - a - b > 0.
        cfg: truncation controls.

    Returns:
        F(a, b; c; z).
    """
    cfg = cfg or SeriesConfig()
    if _is_nonpos_int(c):
        raise ParameterError(f"c = {c} is a non-positive integer")
    if z == 1.0:
        if c - a - b <= 0:
            raise DivergenceError("series diverges at z = 1 when c - a - b <= 0")
        num = [_signed_lgamma(c), _signed_lgamma(c - a - b)]
        den = [_signed_lgamma(c - a), _signed_lgamma(c - b)]
        if any(s == 0.0 for _, s in den):
            return 0.0
        logv = num[0][0] + num[1][0] - den[0][0] - den[1][0]
        sign = num[0][1] * num[1][1] * den[0][1] * den[1][1]
        return sign * math.exp(logv)
    if not abs(z) < 1.0:
        raise DomainError("gauss_2f1 needs |z| < 1 or z = 1")
    total = 1.0
    term = 1.0
    # past this index the term ratio moves monotonically toward z
    k_mono = int(2 * (abs(a) + abs(b) + abs(c) + 1)) + 2
    for k in range(cfg.max_terms):
        ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        term *= ratio
        total += term
        if term == 0.0:
            return total
        # once ratios shrink, the geometric tail bound is valid
        nxt = abs((a + k + 1) * (b + k + 1) / ((c + k + 1) * (k + 2.0)) * z)
        rho = max(nxt, abs(z))
        if k >= k_mono and rho < 1.0:
            tail = abs(term) * rho / (1.0 - rho)
            if tail <= cfg.rel_tol * abs(total):
                return total
    raise ConvergenceError("gauss_2f1 did not converge within max_terms")


def gen_3f2_at1(a1: float, a2: float, a3: float, b1: float, b2: float,
                cfg: SeriesConfig | None = None) -> float:
    """Generalized hypergeometric series 3F2(a1, a2, a3; b1, b2; 1).

    Terms decay like k^(-s-1) with s = b1 + b2 - a1 - a2 - a3, so partial
    sums at K, 2K, 4K, 8K are combined by Richardson elimination of the
    K^-s, K^-(s+1), K^-(s+2) error terms.

    Args:
        a1, a2, a3: numerator parameters.
        b1, b2: denominator parameters (not non-positive integers).
        cfg: truncation controls.

    Returns:
        The series value.
    """
    cfg = cfg or SeriesConfig()
    s = b1 + b2 - a1 - a2 - a3
    if _is_nonpos_int(b1) or _is_nonpos_int(b2):
        raise ParameterError("denominator parameter is a non-positive integer")
    nums = (a1, a2, a3)
    # terminating series
    stops = [int(-a) for a in nums if _is_nonpos_int(a)]
    if stops:
        kmax = min(stops)
        total, term = 1.0, 1.0
        for k in range(kmax):
            term *= (a1 + k) * (a2 + k) * (a3 + k) / ((b1 + k) * (b2 + k) * (k + 1.0))
            total += term
        return total
    if s <= 0:
        raise DivergenceError("3F2 at 1 diverges when b1 + b2 - a1 - a2 - a3 <= 0")
    base = 512
    while True:
        kk = 8 * base
        k = np.arange(kk, dtype=float)
        ratio = (a1 + k) * (a2 + k) * (a3 + k) / ((b1 + k) * (b2 + k) * (k + 1.0))
        # log-space accumulation of the term products
        logt = np.concatenate(([0.0], np.cumsum(np.log(np.abs(ratio)))))
        sgn = np.concatenate(([1.0], np.cumprod(np.sign(ratio))))
        terms = sgn * np.exp(logt)
        partial = np.cumsum(terms)
        sums = [partial[base * m] for m in (1, 2, 4, 8)]
        table = list(sums)
        for p in (s, s + 1.0, s + 2.0):
            f = 2.0 ** p
            table = [(f * table[i + 1] - table[i]) / (f - 1.0) for i in range(len(table) - 1)]
            if len(table) == 1:
                break
        est = table[-1]
        # error proxy: two-level Richardson vs three-level
        prev = [(2.0 ** s * sums[i + 1] - sums[i]) / (2.0 ** s - 1.0) for i in range(3)]
        prev = [(2.0 ** (s + 1) * prev[i + 1] - prev[i]) / (2.0 ** (s + 1) - 1.0) for i in range(2)]
        err = abs(prev[1] - est)
        if err <= max(cfg.rel_tol, 1e-15) * 10 * abs(est) or kk >= cfg.max_terms:
            if err > 1e-8 * abs(est):
                raise ConvergenceError("3F2 series acceleration failed to converge")
            return float(est)
        base *= 2


def jacobi_poly(m: int, alpha: float, beta: float, t):
    """Jacobi polynomial P_m^(alpha, beta)(t) by three-term recurrence.

    Args:
        m: degree.
        alpha, beta: parameters, both > -1.
        t: point(s) in [-1, 1].

    Returns:
        Polynomial values, same shape as t.
    """
    t = np.asarray(t, dtype=float)
    p0 = np.ones_like(t)
    if m == 0:
        return p0 if p0.ndim else float(p0)
    ab = alpha + beta
    p1 = (alpha + 1.0) + 0.5 * (ab + 2.0) * (t - 1.0)
    for k in range(2, m + 1):
        c1 = 2.0 * k * (k + ab) * (2.0 * k + ab - 2.0)
        c2 = (2.0 * k + ab - 1.0) * ((2.0 * k + ab) * (2.0 * k + ab - 2.0) * t + alpha**2 - beta**2)
        c3 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * (2.0 * k + ab)
        p0, p1 = p1, (c2 * p1 - c3 * p0) / c1
    return p1 if p1.ndim else float(p1)


# ---------------------------------------------------------------------------
# closed-form constants


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere S^d in R^(d+1)."""
    if d < 0:
        raise RangeError("sphere dimension must be nonnegative")
    return 2.0 * math.pi ** ((d + 1) / 2.0) / gamma_fn((d + 1) / 2.0)


def sobolev_constant(n: int, k: int) -> float:
    """Sharp Sobolev constant S_{n,k} on R^n for order 2k, with 1 <= k < n/2."""
    if not (1 <= k and 2 * k < n):
        raise RangeError("need 1 <= k < n/2")
    logv = (log_gamma((n + 2 * k) / 2.0) - log_gamma((n - 2 * k) / 2.0)
            + (2.0 * k / n) * math.log(sphere_area(n)))
    return math.exp(logv)


def adams_beta0(m: int, n: int) -> float:
    """Sharp exponential constant beta_0(m, n) of the Adams inequality, 1 <= m < n."""
    if not (1 <= m < n):
        raise RangeError("need 1 <= m < n")
    if m % 2:
        lg = log_gamma((m + 1) / 2.0) - log_gamma((n - m + 1) / 2.0)
    else:
        lg = log_gamma(m / 2.0) - log_gamma((n - m) / 2.0)
    inner = (n / 2.0) * math.log(math.pi) + m * math.log(2.0) + lg
    return n / sphere_area(n - 1) * math.exp(n / (n - m) * inner)


def riesz_gamma(n: int, alpha: float) -> float:
    """Riesz-potential normalization gamma_n(alpha), 0 < alpha < n."""
    if not (0.0 < alpha < n):
        raise RangeError("need 0 < alpha < n")
    logv = ((n / 2.0) * math.log(math.pi) + alpha * math.log(2.0)
            + log_gamma(alpha / 2.0) - log_gamma((n - alpha) / 2.0))
    return math.exp(logv)


def beta_frac(n: int, alpha: float) -> float:
    """Sharp constant beta(2n, alpha) for the fractional Adams inequality on B_C^n.

    Args:
        n: complex dimension (real dimension 2n).
        alpha: order with 0 < alpha < 2n.
    """
    if not (0.0 < alpha < 2 * n):
        raise RangeError("need 0 < alpha < 2n")
    p = 2.0 * n / alpha
    pp = p / (p - 1.0)
    inner = (n * math.log(math.pi) + alpha * math.log(2.0)
             + log_gamma(alpha / 2.0) - log_gamma((2 * n - alpha) / 2.0))
    return 2.0 * n / sphere_area(2 * n - 1) * math.exp(pp * inner)


@dataclass(frozen=True)
class ConstantEntry:
    name: str
    params: tuple
    value: float


@dataclass
class ConstantsTable:
    """Named constants with their parameter tuples."""

    n: int
    entries: list = field(default_factory=list)

    def __post_init__(self):
        for e in self.entries:
            if not e.value > 0:
                raise ParameterError(f"constant {e.name} is not positive")

    def get(self, name: str) -> float:
        for e in self.entries:
            if e.name == name:
                return e.value
        raise KeyError(name)

    def to_json(self) -> str:
        return json.dumps([{"name": e.name, "params": list(e.params), "value": e.value}
                           for e in self.entries], indent=2)

    @classmethod
    def from_json(cls, text: str, n: int) -> "ConstantsTable":
        rows = json.loads(text)
        return cls(n, [ConstantEntry(r["name"], tuple(r["params"]), float(r["value"])) for r in rows])


def constants(n: int, k: int | None = None, alpha: float | None = None,
              m: int | None = None) -> ConstantsTable:
    """Evaluate the closed-form constants for one parameter set.

    Args:
        n: dimension, used literally in each formula (real dimension for S and
            beta0, the Riesz dimension for gamma_riesz, the complex dimension
            for beta_frac).
        k: Sobolev order index, or None to skip S.
        alpha: fractional order, or None to skip gamma_riesz and beta_frac.
        m: Adams order, or None to skip beta0.

    Returns:
        ConstantsTable with the requested entries and omega = |S^n|.
    """
    if n < 2:
        raise RangeError("n must be at least 2")
    rows = [ConstantEntry("omega", (n,), sphere_area(n))]
    if k is not None:
        rows.append(ConstantEntry("S", (n, k), sobolev_constant(n, k)))
    if m is not None:
        rows.append(ConstantEntry("beta0", (m, n), adams_beta0(m, n)))
    if alpha is not None:
        rows.append(ConstantEntry("gamma_riesz", (n, alpha), riesz_gamma(n, alpha)))
        rows.append(ConstantEntry("beta_frac", (n, alpha), beta_frac(n, alpha)))
    return ConstantsTable(n, rows)
