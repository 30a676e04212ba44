"""Mesh study for the conjugated product of Siegel factors.

Compares both sides of the factorization on a random Gaussian at a handful of
points in the Siegel domain, for a sequence of mesh widths. The raw residual
falls like h^4 until rounding (which grows like h^{-2k}) takes over; one
Richardson step removes the leading error term.

Run:
    python demos/factorization_mesh_study.py
"""

import numpy as np

from cxhyp import diffops

rng = np.random.default_rng(3)
n, a, k = 2, 0.5, 2
centers = rng.uniform(-0.3, 0.3, (8, 2 * n))
centers[:, -1] = rng.uniform(0.9, 1.3, 8)
mu = np.zeros(2 * n)
mu[-1] = 1.1
func = diffops.random_gaussian(rng, 2 * n, mu)

print(f"n={n} a={a} k={k}, {len(centers)} points")
print(f"{'h':>8} {'raw':>10} {'raw(h/2)':>10} {'ratio':>7} {'extrapolated':>13}")
for h in (0.16, 0.08, 0.04, 0.02, 0.01):
    rep = diffops.verify_factorization("siegel", a, k, func, centers, diffops.StencilConfig(h=h))
    print(f"{h:8.3f} {rep['raw_residual']:10.2e} {rep['raw_residual_half']:10.2e} "
          f"{rep['ratio']:7.1f} {rep['residual']:13.2e}")

# Plain comparison on one mesh, no extrapolation.
f = diffops.GridFunction.sample(func, centers, 0.04, k * 2)
lhs = diffops.factor_product("siegel", a, k, f).center_values()
rhs = diffops.factorization_rhs("siegel", a, k, f).center_values()
print("single-mesh relative residual at h=0.04:", float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs))))
