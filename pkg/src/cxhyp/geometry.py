"""Ball and Siegel models of complex hyperbolic space.

Points, geodesic distance, ball automorphisms, the Cayley transform,
quadrature on geodesic balls, lattice samples for finite differences and
hyperbolic convolution of radial profiles.

Ball points are stored as 2n interleaved reals (x1, y1, ..., xn, yn). The
metric is the Bergman metric -d d-bar log(1 - |z|^2), so that
rho(0, z) = artanh |z|.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.stats import qmc

from .errors import DomainError, GridMismatchError, ParameterError, ResourceError, SingularPointError

BOUNDARY_GAP = 1e-12
MAX_NODES = 20_000_000


def _as_complex(coords) -> np.ndarray:
    c = np.asarray(coords, dtype=float)
    if c.shape[-1] % 2:
        raise ParameterError("coordinate vector must have even length")
    return c[..., 0::2] + 1j * c[..., 1::2]


def _as_real(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape[:-1] + (2 * z.shape[-1],))
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


@dataclass(frozen=True)
class BallPoint:
    """A point of the unit ball in C^n.

    Args:
        coords: 2n reals (x1, y1, ..., xn, yn).
    """

    coords: tuple

    def __post_init__(self):
        c = tuple(float(v) for v in np.ravel(self.coords))
        if len(c) < 2 or len(c) % 2:
            raise ParameterError("BallPoint needs 2n coordinates")
        object.__setattr__(self, "coords", c)
        if self.norm >= 1.0 - BOUNDARY_GAP:
            raise DomainError(f"|z| = {self.norm} is not inside the ball")

    @classmethod
    def from_complex(cls, z) -> "BallPoint":
        return cls(tuple(_as_real(np.atleast_1d(z))))

    @property
    def n(self) -> int:
        return len(self.coords) // 2

    @property
    def z(self) -> np.ndarray:
        return _as_complex(self.coords)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))

    @property
    def rho(self) -> float:
        return geodesic_rho(self)


@dataclass(frozen=True)
class SiegelPoint:
    """A point of the Siegel domain in Heisenberg coordinates.

    The holomorphic coordinates are w_j = z_j for j < n and
    w_n = t + i (rho_coord + |z|^2).

    Args:
        z: n-1 complex numbers.
        t: Heisenberg height.
        rho_coord: defining function Im w_n - |w'|^2, strictly positive.
    """

    z: tuple
    t: float
    rho_coord: float

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(complex(v) for v in np.ravel(self.z)))
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "rho_coord", float(self.rho_coord))
        if not self.rho_coord > 0:
            raise DomainError("rho_coord must be positive")

    @property
    def n(self) -> int:
        return len(self.z) + 1

    @property
    def w(self) -> np.ndarray:
        zp = np.array(self.z, dtype=complex)
        wn = self.t + 1j * (self.rho_coord + float(np.sum(np.abs(zp) ** 2)))
        return np.append(zp, wn)

    @classmethod
    def from_w(cls, w) -> "SiegelPoint":
        w = np.asarray(w, dtype=complex)
        zp = w[:-1]
        return cls(tuple(zp), w[-1].real, w[-1].imag - float(np.sum(np.abs(zp) ** 2)))


def _pair(z, w):
    """Hermitian pairing (z, w) = sum z_j conj(w_j) over the last axis."""
    return np.sum(z * np.conj(w), axis=-1)


def geodesic_rho(p) -> float:
    """Distance from the origin, 1/2 log((1+|z|)/(1-|z|)).

    Args:
        p: BallPoint, or an array of complex coordinates (last axis = n).

    Returns:
        Distance (array if the input is an array of points).
    """
    if isinstance(p, BallPoint):
        return float(np.arctanh(p.norm))
    r = np.sqrt(np.sum(np.abs(np.asarray(p)) ** 2, axis=-1))
    return np.arctanh(r)


def mobius_c(a: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Ball automorphism phi_a on complex coordinate arrays (broadcasting)."""
    a = np.asarray(a, dtype=complex)
    z = np.asarray(z, dtype=complex)
    aa = np.sum(np.abs(a) ** 2, axis=-1, keepdims=True)
    za = _pair(z, a)[..., None]
    with np.errstate(invalid="ignore", divide="ignore"):
        pz = np.where(aa > 0, za * a / np.where(aa > 0, aa, 1.0), 0.0)
    qz = z - pz
    return (a - pz - np.sqrt(1.0 - aa) * qz) / (1.0 - za)


def mobius(a: BallPoint, z: BallPoint) -> BallPoint:
    """The involutive automorphism phi_a with phi_a(0) = a, phi_a(a) = 0.

    Args:
        a: center of the automorphism.
        z: point to map.

    Returns:
        phi_a(z).
    """
    return BallPoint.from_complex(mobius_c(a.z, z.z))


def distance_c(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Bergman distance between complex coordinate arrays (broadcasting).

    Uses sinh^2 d = (|z-w|^2 + |(z,w)|^2 - |z|^2|w|^2) / ((1-|z|^2)(1-|w|^2)),
    which keeps full relative accuracy at short range.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    zz = np.sum(np.abs(z) ** 2, axis=-1)
    ww = np.sum(np.abs(w) ** 2, axis=-1)
    num = np.sum(np.abs(z - w) ** 2, axis=-1) + np.abs(_pair(z, w)) ** 2 - zz * ww
    return np.arcsinh(np.sqrt(np.maximum(num, 0.0) / ((1.0 - zz) * (1.0 - ww))))


def distance(z: BallPoint, a: BallPoint) -> float:
    """Geodesic distance rho(phi_a(z)) between two ball points."""
    return float(distance_c(z.z, a.z))


def cayley(p: BallPoint) -> SiegelPoint:
    """Cayley transform from the ball onto the Siegel domain.

    Raises:
        SingularPointError: if z_n is numerically -1.
    """
    z = p.z
    den = 1.0 + z[-1]
    if abs(den) < 1e-15:
        raise SingularPointError("Cayley transform is singular at z_n = -1")
    w = np.append(z[:-1] / den, 1j * (1.0 - z[-1]) / den)
    return SiegelPoint.from_w(w)


def cayley_inverse_c(w: np.ndarray) -> np.ndarray:
    """Inverse Cayley transform on holomorphic Siegel coordinates (last axis = n)."""
    w = np.asarray(w, dtype=complex)
    den = 1j + w[..., -1:]
    zn = (1j - w[..., -1:]) / den
    return np.concatenate([w[..., :-1] * 2j / den, zn], axis=-1)


def cayley_inverse(q: SiegelPoint) -> BallPoint:
    """Inverse Cayley transform from the Siegel domain to the ball."""
    return BallPoint.from_complex(cayley_inverse_c(q.w))


def siegel_distance(p: SiegelPoint, q: SiegelPoint) -> float:
    """Bergman distance computed intrinsically in the Siegel domain.

    cosh^2 d = |H(w, v)|^2 / (rho(w) rho(v)) with
    H(w, v) = sum_{j<n} w_j conj(v_j) - (w_n - conj(v_n)) / (2i).
    """
    w, v = p.w, q.w
    h = np.sum(w[:-1] * np.conj(v[:-1])) - (w[-1] - np.conj(v[-1])) / 2j
    c2 = abs(h) ** 2 / (p.rho_coord * q.rho_coord)
    return float(np.arccosh(math.sqrt(max(c2, 1.0))))


def random_ball_points(n: int, count: int, rng: np.random.Generator,
                       max_radius: float = 0.9) -> np.ndarray:
    """Random complex points with |z| <= max_radius (uniform direction, uniform radius)."""
    g = rng.standard_normal((count, 2 * n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    g *= max_radius * rng.random((count, 1))
    return _as_complex(g)


# ---------------------------------------------------------------------------
# sphere and volume quadrature


def sphere_area(d: int) -> float:
    """Surface measure of S^d."""
    return 2.0 * math.pi ** ((d + 1) / 2.0) / math.gamma((d + 1) / 2.0)


def ball_volume(n: int, rho):
    """Bergman volume of the geodesic ball of radius rho in complex dimension n."""
    return sphere_area(2 * n - 1) * np.sinh(rho) ** (2 * n) / (2 * n)


@dataclass(frozen=True)
class SphereRule:
    """Nodes and positive weights on S^{2n-1} in C^n."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.nodes.shape[0] != self.weights.shape[0]:
            raise GridMismatchError("node and weight counts differ")
        if np.any(self.weights <= 0):
            raise ParameterError("sphere weights must be positive")

    @property
    def n(self) -> int:
        return self.nodes.shape[1]

    def integrate(self, values):
        """Weighted sum; complex when the values are complex."""
        out = np.dot(self.weights, values)
        return complex(out) if np.iscomplexobj(out) else float(out)


def _unit_gauss_jacobi(count: int, a: float):
    """Gauss rule on [0, 1] for the weight (1 - x)^a."""
    t, w = special.roots_jacobi(count, a, 0.0)
    return 0.5 * (1.0 + t), w * 0.5 ** (a + 1.0)


def sphere_rule(n: int, phases=8, gauss=None, quasi_random: bool | None = None,
                seed: int = 0, samples: int = 4096) -> SphereRule:
    """Product quadrature on S^{2n-1} in coordinates eta_j = sqrt(u_j) e^{i theta_j}.

    The moduli (u_1, ..., u_n) are uniform on the simplex and handled by a
    conical Gauss-Jacobi product; the phases by trapezoid rules. A rule with
    M phases and G Gauss nodes per simplex direction is exact for
    polynomials in (eta, conj eta) of degree up to min(M - 1, 4G - 2).

    Args:
        n: complex dimension.
        phases: trapezoid count per circle (int or sequence of n ints).
        gauss: Gauss count per simplex direction (int or sequence of n-1 ints);
            default chosen to match the phase resolution.
        quasi_random: use scrambled Sobol points (weight omega/N); default for n >= 4.
        seed: scrambling seed for the quasi-random rule.
        samples: number of quasi-random points.

    Returns:
        SphereRule whose weights sum to omega_{2n-1}.
    """
    if n < 1:
        raise ParameterError("n must be positive")
    area = sphere_area(2 * n - 1)
    if quasi_random is None:
        quasi_random = n >= 4
    if quasi_random:
        m = int(math.ceil(math.log2(max(samples, 2))))
        pts = qmc.Sobol(2 * n, scramble=True, seed=seed).random_base2(m)
        pts = np.clip(pts, 1e-12, 1 - 1e-12)
        g = special.ndtri(pts)
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        return SphereRule(_as_complex(g), np.full(len(g), area / len(g)))
    ph = [int(phases)] * n if np.ndim(phases) == 0 else [int(p) for p in phases]
    if gauss is None:
        gauss = max(2, int(math.ceil((max(ph) + 1) / 4.0)))
    ga = [int(gauss)] * (n - 1) if np.ndim(gauss) == 0 else [int(g) for g in gauss]
    total = int(np.prod(ph)) * int(np.prod(ga) if ga else 1)
    if total > MAX_NODES:
        raise ResourceError(f"sphere rule with {total} nodes is too large")
    # simplex coordinates by the conical product u_i = x_i prod_{l<i}(1 - x_l)
    u = np.ones((1, 0))
    w_simplex = np.ones(1)
    rest = np.ones(1)
    for i in range(n - 1):
        x, wx = _unit_gauss_jacobi(ga[i], float(n - 2 - i))
        ui = rest[:, None] * x[None, :]
        u = np.concatenate([np.repeat(u, len(x), axis=0), ui.reshape(-1, 1)], axis=1)
        w_simplex = (w_simplex[:, None] * wx[None, :]).ravel()
        rest = (rest[:, None] * (1.0 - x)[None, :]).ravel()
    u = np.concatenate([u, rest[:, None]], axis=1)
    mods = np.sqrt(np.maximum(u, 0.0))
    grids = np.meshgrid(*[2 * np.pi * np.arange(p) / p for p in ph], indexing="ij")
    theta = np.stack([g.ravel() for g in grids], axis=1)
    w_torus = np.prod([2 * np.pi / p for p in ph])
    nodes = mods[:, None, :] * np.exp(1j * theta[None, :, :])
    weights = np.repeat(w_simplex, theta.shape[0]) * w_torus * 2.0 ** (1 - n)
    return SphereRule(nodes.reshape(-1, n), weights)


@dataclass(frozen=True)
class QuadratureGrid:
    """Polar product grid on a geodesic ball: radial Gauss panels times a sphere rule.

    The node volume is w_r * sinh^{2n-1}(r) cosh(r) * w_s, which is the
    Bergman volume element in polar coordinates.
    """

    n: int
    radial_nodes: np.ndarray
    radial_weights: np.ndarray
    sphere: SphereRule
    rho_max: float
    panel_order: int = 4

    def __post_init__(self):
        if np.any(self.radial_weights <= 0):
            raise ParameterError("radial weights must be positive")
        if self.sphere.n != self.n:
            raise GridMismatchError("sphere rule dimension does not match n")

    @property
    def size(self) -> int:
        return len(self.radial_nodes) * len(self.sphere.weights)

    @property
    def rho(self) -> np.ndarray:
        return np.repeat(self.radial_nodes, len(self.sphere.weights))

    @property
    def points(self) -> np.ndarray:
        r = np.tanh(self.radial_nodes)
        return (r[:, None, None] * self.sphere.nodes[None, :, :]).reshape(-1, self.n)

    @property
    def volumes(self) -> np.ndarray:
        r = self.radial_nodes
        shell = self.radial_weights * np.sinh(r) ** (2 * self.n - 1) * np.cosh(r)
        return (shell[:, None] * self.sphere.weights[None, :]).ravel()

    def integrate_radial(self, profile) -> float:
        """Integral of a radial profile f(rho) against the volume element."""
        r = self.radial_nodes
        shell = self.radial_weights * np.sinh(r) ** (2 * self.n - 1) * np.cosh(r)
        return float(np.dot(shell, profile(r)) * self.sphere.weights.sum())

    def to_json(self) -> str:
        return json.dumps({
            "n": self.n,
            "rho_max": self.rho_max,
            "panel_order": self.panel_order,
            "radial": {"nodes": self.radial_nodes.tolist(), "weights": self.radial_weights.tolist()},
            "sphere": {"nodes_re": self.sphere.nodes.real.tolist(),
                       "nodes_im": self.sphere.nodes.imag.tolist(),
                       "weights": self.sphere.weights.tolist()},
        })

    @classmethod
    def from_json(cls, text: str) -> "QuadratureGrid":
        d = json.loads(text)
        s = d["sphere"]
        rule = SphereRule(np.array(s["nodes_re"]) + 1j * np.array(s["nodes_im"]), np.array(s["weights"]))
        return cls(d["n"], np.array(d["radial"]["nodes"]), np.array(d["radial"]["weights"]),
                   rule, d["rho_max"], d["panel_order"])


def composite_gauss(a: float, b: float, panels: int, order: int):
    """Composite Gauss-Legendre nodes and weights on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


def build_grid(n: int, radial_count: int, sphere_count: int, rho_max: float = 12.0,
               panel_order: int = 4) -> QuadratureGrid:
    """Quadrature grid on the geodesic ball of radius rho_max.

    Args:
        n: complex dimension.
        radial_count: number of radial nodes (rounded up to whole panels).
        sphere_count: trapezoid phases per circle of the sphere rule.
        rho_max: outer radius.
        panel_order: Gauss points per radial panel; the radial rule is exact
            for polynomials of degree 2*panel_order - 1 on each panel.

    Returns:
        QuadratureGrid.
    """
    if radial_count < 4 or sphere_count < 4:
        raise ParameterError("counts must be at least 4")
    if not rho_max > 0:
        raise ParameterError("rho_max must be positive")
    panels = int(math.ceil(radial_count / panel_order))
    gauss = max(2, int(math.ceil((sphere_count + 1) / 4.0)))
    est = panels * panel_order * sphere_count**n * gauss ** (n - 1)
    if est > MAX_NODES:
        raise ResourceError(f"grid with about {est} nodes is too large")
    r, w = composite_gauss(0.0, rho_max, panels, panel_order)
    return QuadratureGrid(n, r, w, sphere_rule(n, sphere_count, gauss), float(rho_max), panel_order)


def axis_grid(n: int, rho_max: float = 7.0, panels: int = 24, panel_order: int = 8,
              phases: int = 64, gauss: int = 12) -> QuadratureGrid:
    """Polar grid whose sphere rule resolves only the first complex coordinate.

    Integrands that depend on w through rho(w) and (w, z) with z on the first
    axis are integrated to near machine precision with far fewer nodes than
    a full product rule.
    """
    r, w = composite_gauss(0.0, rho_max, panels, panel_order)
    rule = sphere_rule(n, phases=[phases] + [1] * (n - 1), gauss=[gauss] + [1] * (n - 2))
    return QuadratureGrid(n, r, w, rule, float(rho_max), panel_order)


# ---------------------------------------------------------------------------
# sampled functions


@dataclass(frozen=True)
class GridFunction:
    """Samples on a batch of uniform lattices for finite differences.

    values has shape batch + (m_1, ..., m_d); the last d axes are the
    lattice. Node coordinates along axis i are origin[..., i] + h[i] * index.

    Args:
        values: complex or real samples.
        origin: array of shape batch + (d,), coordinates of index 0.
        h: mesh spacing per axis, shape (d,).
    """

    values: np.ndarray
    origin: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        h = np.atleast_1d(np.asarray(self.h, dtype=float))
        origin = np.asarray(self.origin, dtype=float)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "origin", origin)
        if np.any(h <= 0):
            raise ParameterError("mesh spacing must be positive")
        d = len(h)
        if self.values.ndim < d or origin.shape[-1] != d:
            raise GridMismatchError("values, origin and h disagree on the lattice dimension")
        if origin.shape[:-1] != self.values.shape[: self.values.ndim - d]:
            raise GridMismatchError("origin batch shape does not match values")

    @property
    def dim(self) -> int:
        return len(self.h)

    @property
    def shape(self) -> tuple:
        return self.values.shape[self.values.ndim - self.dim:]

    @property
    def batch_shape(self) -> tuple:
        return self.values.shape[: self.values.ndim - self.dim]

    def coord(self, axis: int) -> np.ndarray:
        """Coordinate of every node along one axis, broadcastable to values."""
        d = self.dim
        m = self.shape[axis]
        shape = [1] * d
        shape[axis] = m
        idx = np.arange(m).reshape(shape)
        o = self.origin[..., axis].reshape(self.batch_shape + (1,) * d)
        return o + self.h[axis] * idx

    def coords(self) -> list:
        return [self.coord(i) for i in range(self.dim)]

    @classmethod
    def sample(cls, func, centers, h, half_width: int) -> "GridFunction":
        """Sample func on cubes of (2*half_width+1)^d nodes centred at each center.

        Args:
            func: callable taking a list of d coordinate arrays.
            centers: array (P, d) of lattice centres.
            h: scalar or per-axis spacing.
            half_width: nodes on each side of the centre.
        """
        centers = np.atleast_2d(np.asarray(centers, dtype=float))
        d = centers.shape[1]
        h = np.broadcast_to(np.asarray(h, dtype=float), (d,)).copy()
        m = 2 * half_width + 1
        origin = centers - half_width * h
        proto = cls(np.zeros((len(centers),) + (m,) * d), origin, h)
        vals = np.asarray(func(proto.coords()))
        vals = np.broadcast_to(vals, proto.values.shape).copy()
        return cls(vals, origin, h)

    def with_values(self, values) -> "GridFunction":
        return GridFunction(np.asarray(values), self.origin, self.h)

    def trim(self, k: int) -> "GridFunction":
        """Drop k nodes from both ends of every lattice axis."""
        if k == 0:
            return self
        if any(m <= 2 * k for m in self.shape):
            raise GridMismatchError("lattice too small to trim")
        sl = (Ellipsis,) + (slice(k, -k),) * self.dim
        return GridFunction(self.values[sl], self.origin + k * self.h, self.h)

    def center_values(self) -> np.ndarray:
        """Values at the central node of each lattice in the batch."""
        sl = (Ellipsis,) + tuple(m // 2 for m in self.shape)
        return self.values[sl]

    def _aligned(self, other: "GridFunction"):
        if not np.allclose(self.h, other.h):
            raise GridMismatchError("mesh spacings differ")
        a, b = self, other
        da = (a.shape[0] - b.shape[0])
        if any((ma - mb) != da for ma, mb in zip(a.shape, b.shape)) or da % 2:
            raise GridMismatchError("lattices are not concentric")
        if da > 0:
            a = a.trim(da // 2)
        elif da < 0:
            b = b.trim(-da // 2)
        return a, b

    def __add__(self, other):
        if isinstance(other, GridFunction):
            a, b = self._aligned(other)
            return a.with_values(a.values + b.values)
        return self.with_values(self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            a, b = self._aligned(other)
            return a.with_values(a.values - b.values)
        return self.with_values(self.values - other)

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            a, b = self._aligned(other)
            return a.with_values(a.values * b.values)
        return self.with_values(self.values * other)

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self.values)

    def to_csv(self) -> str:
        """CSV with one row per node: coordinates, value real part, value imaginary part."""
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow([f"x{i}" for i in range(self.dim)] + ["re", "im"])
        xs = np.broadcast_arrays(*self.coords(), self.values)
        flat = [x.ravel() for x in xs]
        vals = flat[-1].astype(complex)
        for row in zip(*flat[:-1], vals.real, vals.imag):
            wr.writerow([repr(float(v)) for v in row])
        return buf.getvalue()


@dataclass(frozen=True)
class NodeFunction:
    """Samples attached to the nodes of a QuadratureGrid."""

    grid: QuadratureGrid
    values: np.ndarray

    def __post_init__(self):
        if np.shape(self.values) != (self.grid.size,):
            raise GridMismatchError(
                f"expected {self.grid.size} values, got shape {np.shape(self.values)}")

    @classmethod
    def sample(cls, grid: QuadratureGrid, func) -> "NodeFunction":
        """Sample func(points) where points has shape (N, n) complex."""
        return cls(grid, np.asarray(func(grid.points)))

    @classmethod
    def radial(cls, grid: QuadratureGrid, profile) -> "NodeFunction":
        return cls(grid, np.asarray(profile(grid.rho)))

    def integral(self) -> complex:
        return np.dot(self.grid.volumes, self.values)


def convolve_radial(kernel, f: NodeFunction, points=None, chunk: int = 256) -> np.ndarray:
    """Direct quadrature of (f * k)(z) = sum_w k(d(z, w)) f(w) dV(w) for a radial kernel.

    Args:
        kernel: callable profile k(rho), vectorized.
        f: samples on a QuadratureGrid.
        points: complex array (P, n) of output points; default the grid nodes.
        chunk: output points per block.

    Returns:
        Array of convolution values at the output points.
    """
    if not isinstance(f, NodeFunction):
        raise GridMismatchError("f must be sampled on a QuadratureGrid")
    grid = f.grid
    pts = grid.points
    zs = pts if points is None else np.atleast_2d(np.asarray(points, dtype=complex))
    if zs.shape[-1] != grid.n:
        raise GridMismatchError("output points have the wrong dimension")
    wv = grid.volumes * f.values
    out = np.empty(len(zs), dtype=np.result_type(wv, float))
    step = max(1, int(chunk * 4096 // max(len(pts), 1)))
    for s in range(0, len(zs), step):
        d = distance_c(zs[s:s + step, None, :], pts[None, :, :])
        out[s:s + step] = kernel(d) @ wv
    return out


# ---------------------------------------------------------------------------
# radial convolution of singular profiles


def _arc_weight(n: int, phi0: np.ndarray) -> np.ndarray:
    """integral over (-phi0, phi0) of (cos phi - cos phi0)^(n-2) dphi."""
    if n == 2:
        return 2.0 * phi0
    if n == 3:
        return 2.0 * (np.sin(phi0) - phi0 * np.cos(phi0))
    x, w = np.polynomial.legendre.leggauss(32)
    # phi = phi0 * x; (cos phi - cos phi0) = 2 sin((phi0-phi)/2) sin((phi0+phi)/2)
    p = phi0[..., None] * x
    f = (2.0 * np.sin(0.5 * (phi0[..., None] - p)) * np.sin(0.5 * (phi0[..., None] + p))) ** (n - 2)
    return phi0 * (f @ w)


def _sphere_average_outside(f, n: int, rho: float, r: np.ndarray, dnodes: int = 48) -> np.ndarray:
    """integral over |w| = tanh r of f(d(w, z)) restricted to d(w, z) > r, with |z| = tanh rho.

    The sphere pushes forward to the unit disc of pairing values xi = (eta, e1)
    with density omega_{2n-3}(1-|xi|^2)^{n-2}; the disc integral is written in
    polar coordinates about xi = 1/tau where cosh d = |1 - tau xi| cosh r cosh rho.
    """
    r = np.asarray(r, dtype=float)
    lo = np.maximum(r, np.abs(rho - r))
    hi = rho + r
    x, w = np.polynomial.legendre.leggauss(dnodes)
    psi = 0.5 * np.pi * (x + 1.0)
    s = 0.5 * (1.0 - np.cos(psi))
    ds = 0.25 * np.pi * np.sin(psi) * w
    span = np.maximum(hi - lo, 0.0)
    d = lo[:, None] + span[:, None] * s[None, :]
    jac = span[:, None] * ds[None, :]
    c = np.cosh(rho) * np.cosh(r)[:, None]
    tau = np.tanh(rho) * np.tanh(r)[:, None]
    v = np.cosh(d) / c
    rr = r[:, None]
    x1 = 2.0 * np.sinh(0.5 * (d + rho - rr)) * np.sinh(0.5 * (d - rho + rr))
    x2 = 2.0 * np.sinh(0.5 * (rho + rr + d)) * np.sinh(0.5 * (rho + rr - d))
    big_x = np.maximum(x1 * x2, 0.0) / c**2
    phi0 = 2.0 * np.arcsin(np.minimum(np.sqrt(big_x / (4.0 * v)), 1.0))
    dens = (v / tau**2) * (2.0 * v / tau**2) ** (n - 2) * _arc_weight(n, phi0)
    vals = f(d) * dens * np.sinh(d) / c
    return sphere_area(2 * n - 3) * np.sum(vals * jac, axis=1)


def _half_convolution(f, g, n: int, rho: float, r_max: float, panel_nodes: int, dnodes: int) -> float:
    """integral over {d(w, z) > rho(w)} of f(d(w, z)) g(rho(w)) dV(w)."""
    x, w = np.polynomial.legendre.leggauss(panel_nodes)
    u = 0.5 * (x + 1.0)
    wu = 0.5 * w
    # panels: geometric toward 0, breakpoints at rho/2 and rho, geometric
    # outward to radius 1, then width 0.5
    first = rho / 2.0
    edges = [first * 2.0 ** (-k) for k in range(30, -1, -1)] + [rho]
    b = 2.0 * rho
    while b < min(1.0, r_max):
        edges.append(b)
        b *= 2.0
    b = edges[-1] + 0.5
    while b < r_max:
        edges.append(b)
        b += 0.5
    edges.append(max(r_max, rho + 1e-9))
    edges = np.array(edges)
    rs, ws = [], []
    # innermost panel [0, edges[0]] with r = b1 u^3 to tame g singularities
    rs.append(edges[0] * u**3)
    ws.append(edges[0] * 3.0 * u**2 * wu)
    for a, bb in zip(edges[:-1], edges[1:]):
        if a == first:
            # the cut-off d > r produces a (r - rho/2)^{3/2} term here
            rs.append(a + (bb - a) * u**2)
            ws.append((bb - a) * 2.0 * u * wu)
        else:
            rs.append(a + (bb - a) * u)
            ws.append((bb - a) * wu)
    r = np.concatenate(rs)
    wr = np.concatenate(ws)
    inner = _sphere_average_outside(f, n, rho, r, dnodes)
    shell = np.sinh(r) ** (2 * n - 1) * np.cosh(r)
    return float(np.sum(wr * g(r) * shell * inner))


def radial_convolution(f, g, n: int, rho, r_max: float = 30.0, panel_nodes: int = 12,
                       dnodes: int = 48) -> np.ndarray:
    """Convolution of two radial profiles on complex hyperbolic space.

    Both profiles may be integrably singular at the origin. The domain is split
    by the bisector {d(w, z) = rho(w)} so that on each half only one profile can
    be singular, and each half is integrated in polar coordinates about its
    singular point.

    Args:
        f, g: vectorized profiles on (0, inf).
        n: complex dimension.
        rho: output distance(s), > 0.
        r_max: outer truncation radius.
        panel_nodes: Gauss nodes per radial panel.
        dnodes: nodes for the distance integral on each sphere.

    Returns:
        (f * g)(rho) for each requested rho.
    """
    rho_arr = np.atleast_1d(np.asarray(rho, dtype=float))
    if np.any(rho_arr <= 0):
        raise ParameterError("rho must be positive")
    out = np.array([
        _half_convolution(f, g, n, p, r_max, panel_nodes, dnodes)
        + _half_convolution(g, f, n, p, r_max, panel_nodes, dnodes)
        for p in rho_arr])
    return out if np.ndim(rho) else float(out[0])
