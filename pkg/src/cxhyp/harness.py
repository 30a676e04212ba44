"""Command-line front end, experiment registry and report persistence.

Every experiment returns an ExperimentReport whose pass flag is derived from
its metrics and tolerances (metric <= tolerance for every toleranced name).
`report all` runs the whole registry, writes one JSON file per experiment and
an index, and checks that the registry covers the required topic manifest.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import diffops, funkhecke, geometry, kernels, rearrange, specfun
from .errors import CxhypError, ParameterError

__all__ = [
    "EXPERIMENTS",
    "REQUIRED_TOPICS",
    "ExperimentReport",
    "MinorantResult",
    "RunConfig",
    "cli_dispatch",
    "main",
    "manifest_gaps",
    "minorant_delta",
    "run_experiment",
]


# ---------------------------------------------------------------------------
# configuration and reports


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by all experiments.

    Args:
        n: complex dimension for the operator and spectral experiments.
        h: finite-difference mesh spacing (halved once for extrapolation).
        order: stencil order, 2 or 4.
        points: interior evaluation points per finite-difference check.
        radial_count, sphere_count: quadrature grid sizes.
        out: output directory for JSON and CSV files, or None.
        seed: base seed of the randomized test families.
        jobs: worker processes for `report all`.
        tol: tolerance override for single `verify` commands.
    """

    n: int = 2
    h: float = 0.04
    order: int = 4
    points: int = 20
    radial_count: int = 48
    sphere_count: int = 24
    out: str | None = None
    seed: int = 42
    jobs: int = 1
    tol: float | None = None

    def __post_init__(self):
        if self.n < 2:
            raise ParameterError("n must be at least 2")
        if self.order not in (2, 4):
            raise ParameterError("order must be 2 or 4")
        if not self.h > 0:
            raise ParameterError("h must be positive")
        if self.points < 1 or self.jobs < 1:
            raise ParameterError("points and jobs must be positive")

    @property
    def stencil(self) -> diffops.StencilConfig:
        return diffops.StencilConfig(order=self.order, h=self.h, richardson=True)

    def rng(self, key: str) -> np.random.Generator:
        """Generator for one experiment, independent of execution order."""
        return np.random.default_rng([self.seed, zlib.crc32(key.encode())])

    def replace(self, **kw) -> "RunConfig":
        return dataclasses.replace(self, **{k: v for k, v in kw.items() if v is not None})


def parse_config_file(path: str) -> dict:
    """Read flat key=value lines ('#' starts a comment) into typed RunConfig fields."""
    types = {f.name: f.type for f in dataclasses.fields(RunConfig)}
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in types:
                raise ParameterError(f"{path}:{lineno}: unknown key {key!r}")
            kind = str(types[key])
            if "int" in kind:
                out[key] = int(val)
            elif "float" in kind:
                out[key] = float(val)
            else:
                out[key] = val
    return out


@dataclass
class ExperimentReport:
    """Outcome of one numerical check.

    Args:
        id: experiment identifier.
        anchor: {"label": ..., "quote": ...}; the quote is the checked formula.
        params: parameters of the run.
        metrics: named real results.
        tolerance: upper bounds for a subset of the metrics.
        runtime_s: wall time.
    """

    id: str
    anchor: dict
    params: dict
    metrics: dict
    tolerance: dict
    runtime_s: float = 0.0
    passed: bool = field(init=False)

    def __post_init__(self):
        if not self.anchor.get("label") or not self.anchor.get("quote"):
            raise ParameterError("anchor needs a label and a quote")
        missing = set(self.tolerance) - set(self.metrics)
        if missing:
            raise ParameterError(f"tolerances without metrics: {sorted(missing)}")
        self.metrics = {k: float(v) for k, v in self.metrics.items()}
        self.passed = all(math.isfinite(self.metrics[k]) and self.metrics[k] <= t
                          for k, t in self.tolerance.items())

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "anchor": dict(self.anchor),
            "params": self.params,
            "metrics": self.metrics,
            "tolerance": {k: float(v) for k, v in self.tolerance.items()},
            "pass": self.passed,
            "runtime_s": self.runtime_s,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=_json_default)

    def summary(self) -> str:
        worst = ", ".join(f"{k}={self.metrics[k]:.3g}<={v:.3g}" for k, v in self.tolerance.items())
        return f"{'PASS' if self.passed else 'FAIL'} {self.id} ({self.runtime_s:.1f}s) {worst}"


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return str(obj)


# ---------------------------------------------------------------------------
# the scalar minorant


@dataclass(frozen=True)
class MinorantResult:
    """Largest admissible delta and how it was established.

    certified is True when the returned delta satisfies the inequality on the
    whole half-line: on the dense grid, at every positive real root of the
    difference polynomial, and in the leading-coefficient limit.
    """

    a: float
    k: int
    delta: float
    certified: bool
    trivial: bool
    grid_min: float
    asymptote: float
    argmin_lambda: float
    lambda_max: float
    grid_count: int


def _minorant_poly(a: float, k: int) -> np.ndarray:
    """Coefficients (highest first) of Q(x) = [prod (x + c_j^2) - prod c_j^2] / x."""
    c2 = np.array([(a - k + 2 * j - 2) ** 2 for j in range(1, k + 1)])
    full = np.poly(-c2)
    return full[:-1]


def minorant_delta(a: float, k: int, lambda_max: float = 50.0, grid_count: int = 200001,
                   margin: float = 1e-9, delta_cap: float = 1e6) -> MinorantResult:
    """Largest delta with prod(l^2 + c_j^2) - prod c_j^2 >= l^2 (l^2 + delta)^{k-1} for all l >= 0.

    Here c_j = a - k + 2j - 2. With x = l^2 the condition reads
    delta <= Q(x)^{1/(k-1)} - x for every x >= 0, so the optimum is the
    infimum of that function. It is scanned on a dense grid of l in
    [0, lambda_max] and compared with its limit sum c_j^2 / (k-1) as x -> inf;
    the smaller value, shrunk by the relative margin, is then certified
    through the real roots of Q(x) - (x + delta)^{k-1}.

    Args:
        a: real parameter.
        k: number of factors, >= 1.
        lambda_max: end of the scanned range.
        grid_count: grid size.
        margin: relative safety margin.
        delta_cap: value returned for k = 1, where every delta works.

    Returns:
        MinorantResult; delta = 0 with certified False when no positive
        delta exists.
    """
    if k < 1:
        raise ParameterError("k must be at least 1")
    if k == 1:
        return MinorantResult(a, k, delta_cap, True, True, delta_cap, math.inf, 0.0,
                              lambda_max, grid_count)
    q = _minorant_poly(a, k)
    lam = np.linspace(0.0, lambda_max, grid_count)
    x = lam**2
    qx = np.polyval(q, x)
    dx = np.maximum(qx, 0.0) ** (1.0 / (k - 1)) - x
    i = int(np.argmin(dx))
    grid_min = float(dx[i])
    asym = float(q[1] / (k - 1))
    best = min(grid_min, asym)
    delta = best * (1.0 - margin) if best > 0 else 0.0
    certified = False
    if delta > 0:
        diff = np.polysub(q, np.poly(np.full(k - 1, -delta)))
        on_grid = bool(np.all(np.polyval(diff, x) >= 0))
        roots = np.roots(diff) if np.any(diff) else np.array([])
        bad = False
        for r in roots:
            if abs(r.imag) <= 1e-9 * max(1.0, abs(r)) and r.real > 0:
                lo, hi = r.real * (1 - 1e-7), r.real * (1 + 1e-7)
                if np.polyval(diff, lo) * np.polyval(diff, hi) < 0:
                    bad = True
        lead = np.trim_zeros(diff, "f")
        tail_ok = len(lead) == 0 or lead[0] > 0
        certified = on_grid and not bad and tail_ok
    return MinorantResult(a, k, float(delta), bool(certified), False, grid_min, asym,
                          float(lam[i]), lambda_max, grid_count)


# ---------------------------------------------------------------------------
# experiments


@dataclass(frozen=True)
class Experiment:
    id: str
    func: Callable
    topics: tuple
    label: str
    quote: str


EXPERIMENTS: dict = {}

REQUIRED_TOPICS = (
    "factorization identity",
    "single-factor conjugations",
    "shift identity",
    "product identities",
    "Geller commutation",
    "Laplace-Beltrami operators",
    "sub-Laplacian",
    "plane-wave eigenfunctions",
    "automorphisms",
    "Cayley transform",
    "ball volume",
    "radial convolution",
    "heat kernels",
    "heat semigroup",
    "odd-dimension recursion",
    "Green functions",
    "potential kernels",
    "kernel asymptotics",
    "Riesz composition",
    "convolution bound",
    "Funk-Hecke eigenvalues",
    "sphere integral",
    "rearrangement",
    "Lorentz norms",
    "O'Neil bound",
    "rearranged kernels",
    "L2 tail",
    "sharp constants",
    "spectral gap",
    "minorant",
)


def experiment(id: str, topics, label: str, quote: str):
    def deco(func):
        EXPERIMENTS[id] = Experiment(id, func, tuple(topics), label, quote)
        return func
    return deco


def manifest_gaps() -> list:
    """Required topics not covered by any registered experiment."""
    covered = {t for e in EXPERIMENTS.values() for t in e.topics}
    return [t for t in REQUIRED_TOPICS if t not in covered]


def _ball_centers(rng, n, count, radius=0.5):
    half = radius / math.sqrt(2 * n)
    return rng.uniform(-half, half, (count, 2 * n))


def _siegel_centers(rng, n, count):
    c = rng.uniform(-0.3, 0.3, (count, 2 * n))
    c[:, -1] = rng.uniform(0.9, 1.3, count)
    return c


def _families(rng, dim, center, degree=4):
    return ([diffops.random_polynomial(rng, dim, degree, center) for _ in range(3)]
            + [diffops.random_gaussian(rng, dim, center) for _ in range(2)])


@experiment("factorization", ["factorization identity", "Laplace-Beltrami operators"],
            "factorization identity, Siegel and ball models",
            "prod_j [rho d_rho^2 + a d_rho + rho T^2 + Delta_b - i(k+1-2j) T] (rho^{(k-n-a)/2} u)"
            " = 4^{-k} rho^{-(k+n+a)/2} prod_j [Delta_B + n^2 - (a-k+2j-2)^2] u")
def _exp_factorization(cfg: RunConfig, rng, models=("ball", "siegel"), a_values=(0.0, 0.5, 1.0),
                       k_values=(1, 2)):
    n = cfg.n
    dim = 2 * n
    worst, ratio_min, order_fail, fails, cases = 0.0, math.inf, 0, 0, 0
    tol = cfg.tol if cfg.tol is not None else 1e-5
    for model in models:
        if model == "ball":
            centers, mu = _ball_centers(rng, n, cfg.points), np.zeros(dim)
        else:
            centers = _siegel_centers(rng, n, cfg.points)
            mu = np.zeros(dim)
            mu[-1] = 1.1
        funcs = _families(rng, dim, mu)
        for a in a_values:
            for k in k_values:
                for f in funcs:
                    rep = diffops.verify_factorization(model, a, k, f, centers, cfg.stencil, tol=tol)
                    cases += 1
                    worst = max(worst, rep["residual"])
                    if not rep["rounding_level"]:
                        ratio_min = min(ratio_min, rep["ratio"])
                        if rep["ratio"] < 12.0:
                            order_fail += 1
                    fails += not rep["pass"]
    params = {"n": n, "models": list(models), "a": list(a_values), "k": list(k_values),
              "h": cfg.h, "order": cfg.order, "points": cfg.points, "functions": 5}
    metrics = {"max_extrapolated_residual": worst, "min_convergence_ratio": ratio_min,
               "order_failures": order_fail, "failed_cases": fails, "cases": cases}
    return params, metrics, {"max_extrapolated_residual": tol, "order_failures": 0}


@experiment("base-cases", ["single-factor conjugations"],
            "single-factor conjugations in both models",
            "rho^{b+1} D_a(rho^{-b} f) = rho[rho(d_rho^2+T^2)+Delta_b-(2b-a)d_rho]f + b(b+1-a)f, b=(n-1+a)/2;"
            " D'_{s-n,s-n}[(1-|z|^2)^{s-n} u] = (1/4)(1-|z|^2)^{s-n-1}[Delta_B + 4s(n-s)]u, s=(n+1-a)/2")
def _exp_base_cases(cfg: RunConfig, rng, a_values=(0.0, 0.5, 1.0)):
    n, dim = cfg.n, 2 * cfg.n
    worst = 0.0
    for model in ("ball", "siegel"):
        centers = _ball_centers(rng, n, cfg.points) if model == "ball" else _siegel_centers(rng, n, cfg.points)
        mu = np.zeros(dim)
        if model == "siegel":
            mu[-1] = 1.1
        for f in _families(rng, dim, mu):
            for a in a_values:
                worst = max(worst, diffops.verify_base_case(model, a, f, centers, cfg.stencil)["residual"])
    return {"n": n, "a": list(a_values), "h": cfg.h}, {"max_residual": worst}, {"max_residual": 1e-5}


INTERTWINING_CASES = (
    ("shift", {"a": 0.5, "beta": 1.0}),
    ("shift", {"a": 0.5, "beta": 2.5}),
    ("even_product", {"a": 0.5, "k": 1}),
    ("even_product", {"a": 0.3, "k": 2}),
    ("odd_product", {"a": 0.5, "k": 1}),
    ("odd_product", {"a": 0.3, "k": 2}),
    ("geller", {"a": 0.5, "l": 1}),
    ("geller", {"a": 0.2, "l": 2}),
    ("geller", {"a": 0.2, "l": 3}),
)


def _intertwining_inputs(name, params, n, rng):
    """Centres, test functions and mesh for one identity.

    The Siegel compositions are of depth up to 2k+1; polynomials of degree 4
    are annihilated by depth 5, so those cases use Gaussians only, on a
    coarser mesh since rounding grows like h^{-2 depth}.
    """
    dim = 2 * n
    if name == "geller":
        centers = _ball_centers(rng, n, 6, radius=0.4)
        funcs = [diffops.random_polynomial(rng, dim, 2), diffops.random_gaussian(rng, dim)]
        return centers, funcs, 0.05
    centers = rng.uniform(-0.2, 0.2, (6, dim))
    centers[:, -1] = rng.uniform(1.3, 1.6, 6)
    mu = np.zeros(dim)
    mu[-1] = 1.4
    depth = 2 * int(params.get("k", 1)) + 1
    funcs = [diffops.random_gaussian(rng, dim, mu)]
    if depth < 5:
        funcs.insert(0, diffops.random_polynomial(rng, dim, 4, mu))
    return centers, funcs, (0.08 if depth >= 5 else 0.06)


@experiment("intertwining", ["shift identity", "product identities", "Geller commutation"],
            "intertwining relations behind the induction",
            "D_{a+b}{D_{a-1}^2+(b-1)^2T^2} = {D_a^2+b^2T^2}D_{a+b-2};"
            " D_{a+2k} prod_j{D_{a-1}^2+(2j-1)^2T^2} = D_a prod_j{D_a^2+4j^2T^2};"
            " D_{a+2k-1}{D_{a-1} prod_{j<k}[D_{a-1}^2+4j^2T^2]} = prod_j{D_a^2+(2j-1)^2T^2};"
            " D'_{(1-a-n-l)/2}[(D'_{(2-a-n)/2}+(l-1)^2/4)^2-((l-1)^2/4)(R-Rbar)^2]"
            " = [(D'_{(1-a-n)/2}+l^2/4)^2-(l^2/4)(R-Rbar)^2]D'_{(3-a-n-l)/2}")
def _exp_intertwining(cfg: RunConfig, rng, cases=INTERTWINING_CASES):
    n = cfg.n
    tol = cfg.tol if cfg.tol is not None else 1e-4
    metrics = {}
    worst = 0.0
    literal_min = math.inf
    for name, params in cases:
        p = dict(params)
        if name == "geller":
            p["n"] = n
        centers, funcs, h = _intertwining_inputs(name, p, n, rng)
        st = diffops.StencilConfig(order=cfg.order, h=h)
        res = max(diffops.verify_intertwining(name, p, f, centers, st, tol=tol)["residual"]
                  for f in funcs)
        key = name + "_" + "_".join(f"{k}{v}" for k, v in params.items())
        metrics[key] = res
        worst = max(worst, res)
        if name in ("even_product", "odd_product") and p["k"] == 1:
            lit = diffops.verify_intertwining(name, p, funcs[-1], centers, st, literal=True)
            literal_min = min(literal_min, lit["residual"])
    metrics["max_residual"] = worst
    # the forms with D_a inside the products are false; their residual stays O(1)
    metrics["literal_forms_min_residual"] = literal_min
    metrics["literal_forms_detected"] = float(literal_min > 1e-2)
    params = {"n": n, "cases": [[c, dict(p)] for c, p in cases], "order": cfg.order}
    return params, metrics, {"max_residual": tol}


@experiment("operators", ["Laplace-Beltrami operators", "sub-Laplacian", "plane-wave eigenfunctions"],
            "operators in both models and plane-wave eigenfunctions",
            "Delta_B e_{lam,zeta} = -(n^2+lam^2) e_{lam,zeta}, e = ((1-|z|^2)/|1-(z,zeta)|^2)^{(n+i lam)/2};"
            " Delta_b = (1/4) sum (X_j^2+Y_j^2); [X_j, Y_j] = -4T; Delta_B rho^s = 4s(s-n) rho^s")
def _exp_operators(cfg: RunConfig, rng, lam=1.0):
    n, dim = cfg.n, 2 * cfg.n
    zeta = rng.normal(size=n) + 1j * rng.normal(size=n)
    zeta /= np.linalg.norm(zeta)
    ep = diffops.EigenParams(lam, zeta)
    ev = -(n * n + lam * lam)
    h = 0.02
    out = {}
    bc = _ball_centers(rng, n, cfg.points)
    g = geometry.GridFunction.sample(diffops.lattice_eigenfunction(ep, "ball"), bc, h, 2)
    v = diffops.laplace_beltrami_ball(g).center_values() / g.center_values()
    out["ball_eigen_rel_error"] = float(np.max(np.abs(v - ev)) / abs(ev))
    sc = _siegel_centers(rng, n, cfg.points)
    g = geometry.GridFunction.sample(diffops.lattice_eigenfunction(ep, "siegel"), sc, h, 2)
    v = diffops.laplace_beltrami_siegel(g).center_values() / g.center_values()
    out["siegel_eigen_rel_error"] = float(np.max(np.abs(v - ev)) / abs(ev))
    # sub-Laplacian of |z'|^2 is n - 1
    g = geometry.GridFunction.sample(lambda c: sum(c[i] ** 2 for i in range(dim - 2)) + 0 * c[-1], sc, 0.1, 2)
    out["sublaplacian_error"] = float(np.max(np.abs(diffops.heisenberg_ops(g)["Delta_b"].center_values() - (n - 1))))
    p = diffops.random_polynomial(rng, dim, 3)
    g = geometry.GridFunction.sample(p, sc, 0.1, 4)
    x, y = diffops.heisenberg_fields(g)
    com = diffops.heisenberg_fields(x)[1] - diffops.heisenberg_fields(y)[0]  # (YX - XY) f = 4 T f
    t = diffops.heisenberg_ops(g)["T"].trim(2)
    out["commutator_error"] = float(np.max(np.abs(com.center_values() - 4 * t.center_values()))
                                    / (np.max(np.abs(t.center_values())) + 1e-12))
    s = 0.7
    g = geometry.GridFunction.sample(lambda c: c[-1] ** s + 0 * c[0], sc, 0.02, 2)
    r = sc[:, -1]
    lb = diffops.laplace_beltrami_siegel(g).center_values()
    out["siegel_power_error"] = float(np.max(np.abs(lb - 4 * s * (s - n) * r**s) / r**s))
    # radial reduction on the ball
    prof = lambda rr: np.exp(-rr**2)  # noqa: E731
    rad = lambda c: prof(np.arctanh(np.sqrt(sum(ci * ci for ci in c))))  # noqa: E731
    g = geometry.GridFunction.sample(rad, bc, 0.01, 2)
    rho = np.arctanh(np.linalg.norm(bc, axis=1))
    exact = diffops.radial_laplacian(prof, lambda rr: -2 * rr * prof(rr),
                                     lambda rr: (4 * rr * rr - 2) * prof(rr), rho, n)
    out["radial_reduction_error"] = float(np.max(np.abs(diffops.laplace_beltrami_ball(g).center_values() - exact))
                                          / np.max(np.abs(exact)))
    tol = {"ball_eigen_rel_error": 1e-4, "siegel_eigen_rel_error": 1e-4, "sublaplacian_error": 1e-10,
           "commutator_error": 1e-8, "siegel_power_error": 1e-4, "radial_reduction_error": 1e-4}
    return {"n": n, "lambda": lam, "zeta": [zeta.real.tolist(), zeta.imag.tolist()]}, out, tol


@experiment("geometry", ["automorphisms", "Cayley transform", "ball volume", "radial convolution"],
            "automorphisms, Cayley transform, volume and convolution of radial functions",
            "1-|phi_a(z)|^2 = (1-|a|^2)(1-|z|^2)/|1-(z,a)|^2; phi_a o phi_a = id;"
            " |B_rho| = omega_{2n-1} sinh^{2n}(rho)/(2n); f*k = k*f for radial f")
def _exp_geometry(cfg: RunConfig, rng):
    n = cfg.n
    a = geometry.random_ball_points(n, 50, rng)
    z = geometry.random_ball_points(n, 50, rng)
    w = geometry.random_ball_points(n, 50, rng)
    pz = geometry.mobius_c(a, z)
    lhs = 1 - np.sum(np.abs(pz) ** 2, axis=-1)
    pair = np.sum(z * np.conj(a), axis=-1)
    rhs = (1 - np.sum(np.abs(a) ** 2, -1)) * (1 - np.sum(np.abs(z) ** 2, -1)) / np.abs(1 - pair) ** 2
    out = {"mobius_identity_error": float(np.max(np.abs(lhs - rhs) / rhs)),
           "involution_error": float(np.max(np.abs(geometry.mobius_c(a, pz) - z)))}
    d0 = geometry.distance_c(z, w)
    d1 = geometry.distance_c(pz, geometry.mobius_c(a, w))
    out["isometry_error"] = float(np.max(np.abs(d1 - d0)))
    errs = []
    for zi, wi in zip(z[:20], w[:20]):
        p, q = geometry.BallPoint.from_complex(zi), geometry.BallPoint.from_complex(wi)
        errs.append(abs(geometry.siegel_distance(geometry.cayley(p), geometry.cayley(q)) - geometry.distance(p, q)))
    out["cayley_distance_error"] = float(max(errs))
    rho = 1.5
    grid = geometry.build_grid(n, 32, 8, rho_max=rho, panel_order=8)
    vol = float(np.sum(grid.volumes))
    exact = specfun.sphere_area(2 * n - 1) * math.sinh(rho) ** (2 * n) / (2 * n)
    out["ball_volume_error"] = abs(vol / exact - 1)
    f = lambda r: np.exp(-r**2)  # noqa: E731
    k = lambda r: np.exp(-2 * r**2) * (1 + r * r)  # noqa: E731
    ag = geometry.axis_grid(n)
    pt = np.zeros((1, n), dtype=complex)
    pt[0, 0] = math.tanh(0.7)
    fk = geometry.convolve_radial(k, geometry.NodeFunction.radial(ag, f), pt)[0]
    kf = geometry.convolve_radial(f, geometry.NodeFunction.radial(ag, k), pt)[0]
    split = geometry.radial_convolution(f, k, n, 0.7)
    out["commutativity_error"] = float(abs(fk - kf) / abs(fk))
    out["split_route_error"] = float(abs(fk - split) / abs(fk))
    tol = {"mobius_identity_error": 1e-12, "involution_error": 1e-10, "isometry_error": 1e-9,
           "cayley_distance_error": 1e-8, "ball_volume_error": 1e-8, "commutativity_error": 1e-10,
           "split_route_error": 1e-8}
    return {"n": n, "pairs": 50}, out, tol


@experiment("heat", ["heat kernels", "heat semigroup"],
            "heat kernels: unit mass and semigroup property",
            "int p_t dV = 1; p_t * p_s = p_{t+s}")
def _exp_heat(cfg: RunConfig, rng):
    out, tol = {}, {}
    for t in (0.25, 1.0):
        for m, dim in ((1, 3), (2, 5)):
            key = f"mass_error_real_dim{dim}_t{t:g}"
            out[key] = abs(kernels.radial_mass(lambda r: kernels.heat_real_odd(t, r, m), dim) - 1)
            tol[key] = 1e-8
        key = f"mass_error_complex_n2_t{t:g}"
        out[key] = abs(kernels.radial_mass(lambda r: kernels.heat_complex(t, r, 2), 0, complex_dim=2,
                                           rho_max=4 * t + 12 * math.sqrt(t) + 6, panels=40) - 1)
        tol[key] = 1e-5
    out["mass_error_real_dim2_t1"] = abs(kernels.radial_mass(lambda r: kernels.heat_real_even(1.0, r, 1), 2,
                                                             rho_max=30) - 1)
    tol["mass_error_real_dim2_t1"] = 1e-6
    t, s = 0.3, 0.7
    rho = np.linspace(0.0, 3.0, 13)
    out["semigroup_defect_real_dim3"] = kernels.semigroup_defect(t, s, rho, dim=3)
    out["semigroup_defect_complex_n2"] = kernels.semigroup_defect(t, s, rho, n=2)
    tol["semigroup_defect_real_dim3"] = 1e-4
    tol["semigroup_defect_complex_n2"] = 1e-4
    return {"t_values": [0.25, 1.0], "semigroup": [t, s], "rho": rho.tolist()}, out, tol


@experiment("recursion", ["odd-dimension recursion"],
            "dimension-raising recursion for radial kernels",
            "a radial identity linking H^{N+2} and H^N kernels through -(1/(2 pi sinh rho)) d/drho")
def _exp_recursion(cfg: RunConfig, rng):
    worst = 0.0
    for beta in (1.0, 2.5, 4.0):
        for rho in (0.1, 1.0, 3.0):
            worst = max(worst, kernels.abel_inversion_check(beta, rho)[2])
    return {"beta": [1.0, 2.5, 4.0], "rho": [0.1, 1.0, 3.0]}, {"max_rel_error": worst}, {"max_rel_error": 1e-8}


@experiment("green", ["Green functions"],
            "Green functions versus order-2 potential kernels",
            "G_nu = (-Delta_B - n^2 + nu^2)^{-1} kernel = k_{nu,2}")
def _exp_green(cfg: RunConfig, rng):
    worst = 0.0
    for nu in (0.5, 1.0):
        for rho in (0.5, 1.0, 2.0):
            g = kernels.green_complex(nu, rho, 2)
            b = kernels.bgr_kernel(nu, 2.0, rho, 2)
            worst = max(worst, abs(g / b - 1))
    rr = np.array([0.3, 1.0, 2.5])
    real = float(np.max(np.abs(kernels.green_real(0.7, rr, 3) / kernels.green_real_mellin(0.7, rr, 3) - 1)))
    return ({"nu": [0.5, 1.0], "rho": [0.5, 1.0, 2.0]},
            {"complex_vs_potential": worst, "real_quadrature_vs_mellin": real},
            {"complex_vs_potential": 1e-4, "real_quadrature_vs_mellin": 1e-8})


@experiment("kernel-asymptotics", ["potential kernels", "kernel asymptotics"],
            "Bessel-Green-Riesz kernels: singularity and decay",
            "k_{zeta,alpha}(rho) ~ rho^{alpha-2n}/gamma_{2n}(alpha) as rho -> 0;"
            " k_{zeta,alpha} ~ rho^{alpha/2-1} e^{-(zeta+n) rho}, k_alpha ~ rho^{alpha-2} e^{-n rho} as rho -> inf")
def _exp_kernel_asymptotics(cfg: RunConfig, rng):
    out = {}
    tol = {}
    small = np.geomspace(1e-4, 1e-3, 6)
    large = np.linspace(4.0, 16.0, 13)
    for n, alpha in ((2, 1.0), (2, 2.0)):
        for zeta in (0.0, 0.5, 1.0):
            key = f"n{n}_a{alpha:g}_z{zeta:g}"
            p = kernels.fit_power(small, kernels.bgr_kernel(zeta, alpha, small, n))
            q, _ = kernels.fit_decay(large, kernels.bgr_kernel(zeta, alpha, large, n))
            out[f"small_exponent_rel_error_{key}"] = abs(p / (alpha - 2 * n) - 1)
            out[f"decay_rate_rel_error_{key}"] = abs(q / (zeta + n) - 1)
            tol[f"small_exponent_rel_error_{key}"] = 0.02
            tol[f"decay_rate_rel_error_{key}"] = 0.02
    rr = np.array([0.1, 1.0, 3.0])
    mel = kernels.bgr_kernel(0.5, 1.0, rr, 2, route="mellin")
    bes = kernels.bgr_kernel(0.5, 1.0, rr, 2, route="bessel")
    out["mellin_vs_bessel"] = float(np.max(np.abs(mel / bes - 1)))
    tol["mellin_vs_bessel"] = 1e-6
    return {"pairs": [[2, 1.0], [2, 2.0]], "zeta": [0.0, 0.5, 1.0], "small_rho": [1e-4, 1e-3],
            "large_rho": [4.0, 16.0]}, out, tol


@experiment("constants", ["sharp constants", "Riesz composition"],
            "closed-form constants",
            "beta_0(1,2) = 4 pi; beta_0(2,4) = 32 pi^2; beta(2n,alpha) = (2n/omega_{2n-1}) gamma_{2n}(alpha)^{p'};"
            " int |x|^{a-2}|y-x|^{b-2} dx = gamma_2(a) gamma_2(b)/gamma_2(a+b) |y|^{a+b-2}")
def _exp_constants(cfg: RunConfig, rng):
    out = {"beta0_1_2_error": abs(specfun.adams_beta0(1, 2) / (4 * math.pi) - 1),
           "beta0_2_4_error": abs(specfun.adams_beta0(2, 4) / (32 * math.pi**2) - 1)}
    n, alpha = 2, 1.0
    p = 2 * n / alpha
    pp = p / (p - 1)
    ident = 2 * n / specfun.sphere_area(2 * n - 1) * specfun.riesz_gamma(2 * n, alpha) ** pp
    out["beta_identity_error"] = abs(specfun.beta_frac(n, alpha) / ident - 1)
    num, exact = kernels.riesz_planar_ratio(0.5, 0.5)
    out["riesz_composition_error"] = abs(num / exact - 1)
    out["sobolev_S_3_1_error"] = abs(specfun.sobolev_constant(3, 1) / (0.75 * (2 * math.pi**2) ** (2 / 3)) - 1)
    tol = {"beta0_1_2_error": 1e-12, "beta0_2_4_error": 1e-12, "beta_identity_error": 1e-12,
           "riesz_composition_error": 0.01, "sobolev_S_3_1_error": 1e-12}
    return {"beta_identity": [n, alpha], "riesz": [0.5, 0.5]}, out, tol


@experiment("conv-bound", ["convolution bound"],
            "convolution of potential kernels near 0 and at infinity",
            "(k_alpha * k_{zeta,beta})(rho) <= (1+o(1)) rho^{alpha+beta-2n}/gamma_{2n}(alpha+beta), rho -> 0;"
            " <= C max(e^{-(zeta'+n) rho}, (rho^{alpha-2} e^{-n rho}) * k_{zeta,beta}), rho -> inf")
def _exp_conv_bound(cfg: RunConfig, rng):
    r = kernels.conv_bound_check(0.5, 1.5, 1.0, 2)
    out = {"small_rho_leading_ratio": r["small_rho_leading_ratio"],
           "large_rho_log_excess": r["large_rho_log_excess"],
           "fitted_constant": r["fitted_constant"]}
    return ({"alpha": 0.5, "beta": 1.5, "zeta": 1.0, "n": 2, "rho_small": 0.05, "rho_large": 8.0},
            out, {"small_rho_leading_ratio": 1.1, "large_rho_log_excess": 0.2})


@experiment("funk-hecke", ["Funk-Hecke eigenvalues", "sphere integral"],
            "sphere integrals of pairing kernels",
            "int_{S^{2n-1}} |1-(r xi, eta)|^{-alpha} dsigma(eta) = omega_{2n-1} F(alpha/2, alpha/2; n; r^2);"
            " int K((xi,eta)) Y(eta) dsigma = lambda_{j,k} Y(xi), Y in H_{j,k}")
def _exp_funk_hecke(cfg: RunConfig, rng):
    out, tol = {}, {}
    rs = [0.0, 0.3, 0.6, 0.9]
    for n, alpha in ((2, 1.0), (2, 2.0), (3, 2.0)):
        r = funkhecke.verify_radial_eigenvalues(alpha, rs, n)
        out[f"spread_n{n}_a{alpha:g}"] = r["relative_spread"]
        out[f"constant_error_n{n}_a{alpha:g}"] = r["constant_rel_error"]
        tol[f"spread_n{n}_a{alpha:g}"] = 1e-6
        tol[f"constant_error_n{n}_a{alpha:g}"] = 1e-6
    kern = lambda w: np.abs(1 - 0.5 * w) ** (-3.0)  # noqa: E731
    worst = 0.0
    for n in (2, 3):
        for j, k in ((0, 0), (1, 0), (2, 1), (1, 3)):
            a = funkhecke.funk_hecke_eigenvalue(j, k, kern, n)
            b = funkhecke.direct_eigenvalue(j, k, kern, n)
            worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
    out["eigenvalue_vs_direct"] = worst
    tol["eigenvalue_vs_direct"] = 1e-6
    return {"r": rs, "bidegrees": [[0, 0], [1, 0], [2, 1], [1, 3]]}, out, tol


def _random_steps(rng, count=None):
    count = count or int(rng.integers(3, 12))
    vals = rng.normal(size=count) * rng.uniform(0.1, 3.0)
    meas = rng.uniform(0.05, 2.0, count)
    return rearrange.WeightedSamples(vals, meas)


@experiment("rearrangement", ["rearrangement", "Lorentz norms", "O'Neil bound", "rearranged kernels"],
            "rearrangements, Lorentz functionals, O'Neil's bound and rearranged kernels",
            "int (f*)^p = int |f|^p; ||f||_{p,q} <= ||f||*_{p,q} <= p/(p-1) ||f||_{p,q};"
            " (f*g)*(t) <= t^{-1} int_0^t f* int_0^t g* + int_t^inf f* g*;"
            " k*(t) gamma_{2n}(s) (2nt/omega_{2n-1})^{(2n-s)/2n} -> 1")
def _exp_rearrangement(cfg: RunConfig, rng):
    out = {}
    eq = 0.0
    comparison_fail = 0
    for _ in range(50):
        f = _random_steps(rng)
        fs = rearrange.decreasing_rearrangement(f)
        for p in (1.0, 2.0, 3.5):
            eq = max(eq, abs(fs.integral_power(p) / f.lp_norm(p) ** p - 1))
        p = float(rng.uniform(1.2, 4.0))
        q = float(rng.choice([1.0, 2.0, 3.0, math.inf]))
        lo = rearrange.lorentz_norm(fs, p, q)
        mid = rearrange.lorentz_norm(fs, p, q, starred=True)
        if not (lo <= mid * (1 + 1e-12) and mid <= p / (p - 1) * lo * (1 + 1e-12)):
            comparison_fail += 1
    out["equimeasurability_error"] = eq
    out["lorentz_comparison_failures"] = comparison_fail
    bump = lambda R: (lambda r: np.where(r < R, (1 - (np.minimum(r, R) / R) ** 2) ** 3, 0.0))  # noqa: E731
    on = rearrange.oneil_pointwise_check(bump(1.5), bump(1.0), 2, [0.1, 1.0, 5.0], support=1.5)
    out["oneil_min_slack"] = min(r["slack"] for r in on["rows"])
    out["oneil_negative_slack"] = -min(0.0, out["oneil_min_slack"])
    out["oneil_u_nonincreasing"] = float(on["u_nonincreasing"])
    k1 = rearrange.rearranged_kernel_bounds("k_zeta_alpha", {"n": 2, "alpha": 1.0, "zeta": 1.0}, [1e-4])
    k2 = rearrange.rearranged_kernel_bounds("conv", {"n": 2, "alpha": 0.5, "beta": 1.5, "zeta": 1.0}, [1e-4])
    out["leading_error_k_zeta_alpha"] = abs(k1["leading_ratio"][0] - 1)
    out["leading_error_conv"] = abs(k2["leading_ratio"][0] - 1)
    out["large_t_exponent_error_k_zeta_alpha"] = abs(k1["large_t_exponent_fixed_log"] - k1["predicted_exponent"])
    out["large_t_exponent_conv"] = k2["large_t_exponent_free"]
    tol = {"equimeasurability_error": 1e-12, "lorentz_comparison_failures": 0, "oneil_negative_slack": 0.0,
           "leading_error_k_zeta_alpha": 0.1, "leading_error_conv": 0.1,
           "large_t_exponent_error_k_zeta_alpha": 0.01}
    return {"step_functions": 50, "oneil_t": [0.1, 1.0, 5.0], "t_small": 1e-4}, out, tol


@experiment("l2-tail", ["L2 tail"],
            "square integrability of the rearranged convolution tail",
            "int_c^inf |[k_alpha * k_{zeta,beta}]*(t)|^2 dt < inf")
def _exp_l2_tail(cfg: RunConfig, rng):
    a = rearrange.l2_tail_check(1.0, 1.0, 1.0, 2, 1.0, rho_max=10.0)
    b = rearrange.l2_tail_check(1.0, 1.0, 1.0, 2, 1.0, rho_max=20.0, panels=24)
    out = {"value": b["value"], "value_half_range": a["value"],
           "relative_change": abs(b["value"] / a["value"] - 1), "tail_power": b["tail_power"]}
    return ({"alpha": 1.0, "beta": 1.0, "zeta": 1.0, "n": 2, "c": 1.0, "rho_max": [10.0, 20.0]},
            out, {"relative_change": 0.01})


@experiment("spectral-gap", ["spectral gap"],
            "bottom of the spectrum of the Bergman Laplacian",
            "int |grad f|^2 dV >= n^2 int f^2 dV")
def _exp_spectral_gap(cfg: RunConfig, rng):
    n = cfg.n
    grid = geometry.build_grid(n, cfg.radial_count, cfg.sphere_count, rho_max=2.6)
    qs = [diffops.rayleigh_quotient(diffops.random_bump(rng, n), grid) for _ in range(20)]
    prof, dprof = diffops.wide_bump(n, 10.0)
    wide = diffops.rayleigh_quotient_radial(prof, dprof, n, 10.0)
    out = {"min_quotient_over_n2": min(qs) / n**2,
           "gap_shortfall": max(0.0, 1 - min(qs) / n**2),
           "wide_bump_over_n2": wide / n**2}
    return ({"n": n, "functions": 20, "wide_radius": 10.0, "grid": [cfg.radial_count, cfg.sphere_count]},
            out, {"gap_shortfall": 1e-3, "wide_bump_over_n2": 1.1})


@experiment("minorant", ["minorant"],
            "scalar minorant of the factorized symbol",
            "prod_j (l^2 + c_j^2) - prod_j c_j^2 >= l^2 (l^2 + delta)^{k-1}, c_j = a-k+2j-2")
def _exp_minorant(cfg: RunConfig, rng, cases=((0.0, 2), (0.5, 3))):
    out = {}
    tol = {}
    for a, k in cases:
        r = minorant_delta(a, k)
        key = f"a{a:g}_k{k}"
        out[f"delta_{key}"] = r.delta
        out[f"uncertified_{key}"] = float(not (r.certified and r.delta > 0))
        tol[f"uncertified_{key}"] = 0.0
    return {"cases": [list(c) for c in cases], "lambda_max": 50.0}, out, tol


def run_experiment(exp_id: str, cfg: RunConfig, **overrides) -> ExperimentReport:
    """Run one registered experiment and wrap its result."""
    if exp_id not in EXPERIMENTS:
        raise ParameterError(f"unknown experiment {exp_id!r}")
    e = EXPERIMENTS[exp_id]
    t0 = time.perf_counter()
    params, metrics, tol = e.func(cfg, cfg.rng(exp_id), **overrides)
    params = dict(params, seed=cfg.seed)
    return ExperimentReport(exp_id, {"label": e.label, "quote": e.quote}, params, metrics, tol,
                            runtime_s=round(time.perf_counter() - t0, 3))


def _run_one(args):
    exp_id, cfg = args
    return run_experiment(exp_id, cfg)


def report_all(cfg: RunConfig, ids=None) -> list:
    """Run every experiment (in parallel up to cfg.jobs) and persist the reports."""
    ids = list(ids or EXPERIMENTS)
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            reports = list(pool.map(_run_one, [(i, cfg) for i in ids]))
    else:
        reports = [run_experiment(i, cfg) for i in ids]
    if cfg.out:
        write_reports(reports, cfg)
    return reports


def write_reports(reports, cfg: RunConfig):
    os.makedirs(cfg.out, exist_ok=True)
    for r in reports:
        with open(os.path.join(cfg.out, f"{r.id}.json"), "w") as fh:
            fh.write(r.to_json())
    index = {
        "seed": cfg.seed,
        "experiments": [{"id": r.id, "pass": r.passed, "file": f"{r.id}.json"} for r in reports],
        "manifest_missing": manifest_gaps(),
        "all_pass": all(r.passed for r in reports) and not manifest_gaps(),
    }
    with open(os.path.join(cfg.out, "index.json"), "w") as fh:
        json.dump(index, fh, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# command line


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _common(p):
    p.add_argument("--config", help="flat key=value file; flags override it")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int, help="seed of the randomized families (default 42)")
    p.add_argument("--jobs", type=int, help="worker processes")
    p.add_argument("--tol", type=float, help="tolerance override for a single check")
    p.add_argument("--n", type=int, help="complex dimension")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cxhyp", description="Numerical checks on complex hyperbolic space.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    kp = sub.add_parser("kernel", help="evaluate or tabulate a radial kernel")
    ksub = kp.add_subparsers(dest="action", parser_class=_Parser)
    ksub.required = True
    for name in ("eval", "table"):
        q = ksub.add_parser(name)
        _common(q)
        q.add_argument("--kind", required=True,
                       choices=["k_alpha", "k_zeta_alpha", "heat_complex", "green_complex"])
        q.add_argument("--alpha", type=float, default=0.0)
        q.add_argument("--zeta", type=float, default=0.0)
        q.add_argument("--nu", type=float, default=None, help="Green function parameter")
        q.add_argument("--t", type=float, default=0.0, help="heat kernel time")
        q.add_argument("--route", choices=["mellin", "bessel"], default="mellin")
        if name == "eval":
            q.add_argument("--rho", type=float, nargs="+", required=True)
        else:
            q.add_argument("--rho-max", type=float, default=24.0)

    vp = sub.add_parser("verify", help="run one check")
    vsub = vp.add_subparsers(dest="check", parser_class=_Parser)
    vsub.required = True
    q = vsub.add_parser("factorization")
    _common(q)
    q.add_argument("--model", choices=["ball", "siegel"], default=None)
    q.add_argument("--a", type=float, default=None)
    q.add_argument("--k", type=int, default=None)
    q = vsub.add_parser("intertwine")
    _common(q)
    q.add_argument("--identity", choices=["shift", "even_product", "odd_product", "geller"], default=None)
    q.add_argument("--a", type=float, default=0.5)
    q.add_argument("--beta", type=float, default=2.0)
    q.add_argument("--k", type=int, default=1)
    q.add_argument("--l", type=int, default=1)
    q.add_argument("--literal", action="store_true", help="use the forms with D_a inside the products")
    for name in ("heat", "green", "funk-hecke", "rearrange", "spectral-gap"):
        _common(vsub.add_parser(name))
    q = vsub.add_parser("minorant")
    _common(q)
    q.add_argument("--a", type=float, default=None)
    q.add_argument("--k", type=int, default=None)
    q.add_argument("--lambda-max", type=float, default=50.0)

    rp = sub.add_parser("report", help="run the experiment suite")
    rsub = rp.add_subparsers(dest="action", parser_class=_Parser)
    rsub.required = True
    _common(rsub.add_parser("all"))
    return parser


def _config_from_args(args) -> RunConfig:
    base = parse_config_file(args.config) if getattr(args, "config", None) else {}
    cfg = RunConfig(**base)
    return cfg.replace(out=args.out, seed=args.seed, jobs=args.jobs, tol=args.tol,
                       n=getattr(args, "n", None))


def _emit(report: ExperimentReport, cfg: RunConfig):
    print(report.to_json())
    print(report.summary())
    if cfg.out:
        write_reports([report], cfg)


def _kernel_command(args, cfg: RunConfig) -> int:
    n = cfg.n
    if args.kind == "k_alpha":
        fn = lambda r: kernels.bgr_kernel(0.0, args.alpha, r, n, route=args.route)  # noqa: E731
        params = {"alpha": args.alpha}
    elif args.kind == "k_zeta_alpha":
        fn = lambda r: kernels.bgr_kernel(args.zeta, args.alpha, r, n, route=args.route)  # noqa: E731
        params = {"alpha": args.alpha, "zeta": args.zeta}
    elif args.kind == "heat_complex":
        fn = lambda r: kernels.heat_complex(args.t, r, n)  # noqa: E731
        params = {"t": args.t}
    else:
        nu = args.nu if args.nu is not None else args.zeta
        fn = lambda r: kernels.green_complex(nu, r, n)  # noqa: E731
        params = {"nu": nu}
    if args.action == "eval":
        vals = np.atleast_1d(fn(np.asarray(args.rho, dtype=float)))
        for r, v in zip(args.rho, vals):
            print(f"{r!r},{float(v)!r}")
        return 0
    zeta = params.get("zeta", params.get("nu", 0.0))
    route = "bessel" if args.kind in ("k_alpha", "k_zeta_alpha") else args.route
    tab = kernels.kernel_table(args.kind, n, alpha=args.alpha, zeta=zeta, t=args.t,
                               rho_max=args.rho_max, route=route)
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        stem = os.path.join(cfg.out, f"{args.kind}_n{n}")
        with open(stem + ".csv", "w") as fh:
            fh.write(tab.to_csv())
        with open(stem + ".json", "w") as fh:
            fh.write(tab.sidecar())
        print(stem + ".csv")
    else:
        sys.stdout.write(tab.to_csv())
    return 0


def _verify_command(args, cfg: RunConfig) -> int:
    check = args.check
    if check == "factorization":
        kw = {}
        if args.model:
            kw["models"] = (args.model,)
        if args.a is not None:
            kw["a_values"] = (args.a,)
        if args.k is not None:
            kw["k_values"] = (args.k,)
        rep = run_experiment("factorization", cfg, **kw)
    elif check == "intertwine":
        if args.identity is None:
            rep = run_experiment("intertwining", cfg)
        else:
            p = {"a": args.a}
            if args.identity == "shift":
                p["beta"] = args.beta
            elif args.identity == "geller":
                p["l"] = args.l
            else:
                p["k"] = args.k
            if args.literal:
                rep = _literal_report(args.identity, p, cfg)
            else:
                rep = run_experiment("intertwining", cfg, cases=((args.identity, p),))
    elif check == "minorant":
        if args.a is not None or args.k is not None:
            a = args.a if args.a is not None else 0.0
            k = args.k if args.k is not None else 2
            rep = run_experiment("minorant", cfg, cases=((a, k),))
        else:
            rep = run_experiment("minorant", cfg)
    else:
        rep = run_experiment({"heat": "heat", "green": "green", "funk-hecke": "funk-hecke",
                              "rearrange": "rearrangement", "spectral-gap": "spectral-gap"}[check], cfg)
    _emit(rep, cfg)
    return 0 if rep.passed else 1


def _literal_report(name, params, cfg: RunConfig) -> ExperimentReport:
    rng = cfg.rng("intertwining-literal")
    p = dict(params)
    if name == "geller":
        raise ParameterError("--literal applies to the product identities only")
    centers, funcs, h = _intertwining_inputs(name, p, cfg.n, rng)
    st = diffops.StencilConfig(order=cfg.order, h=h)
    res = max(diffops.verify_intertwining(name, p, f, centers, st, literal=True)["residual"] for f in funcs)
    tol = cfg.tol if cfg.tol is not None else 1e-4
    return ExperimentReport("intertwining-literal", {"label": "product identities with D_a inside",
                                                      "quote": "D_{a+2k} prod_j{D_a^2+(2j-1)^2T^2} = D_a prod_j{D_a^2+4j^2T^2}"},
                            {"identity": name, **p, "seed": cfg.seed}, {"residual": res}, {"residual": tol})


def cli_dispatch(argv=None) -> int:
    """Run the command line; 0 if all selected checks pass, 1 on failure, 2 on usage errors."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2
    try:
        cfg = _config_from_args(args)
        if args.command == "kernel":
            return _kernel_command(args, cfg)
        if args.command == "verify":
            return _verify_command(args, cfg)
        reports = report_all(cfg)
        for r in reports:
            print(r.summary())
        gaps = manifest_gaps()
        if gaps:
            print("manifest topics without an experiment: " + ", ".join(gaps))
        return 0 if all(r.passed for r in reports) and not gaps else 1
    except (CxhypError, OSError) as exc:
        print(f"cxhyp: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_dispatch())
