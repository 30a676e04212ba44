"""Rearrangements of a step function, O'Neil's bound, and the scalar minorant.

1. A random signed step function is rearranged exactly; its Lorentz
   functionals sit between the two sides of the Hardy comparison.
2. Two compactly supported radial bumps on the ball: their convolution
   rearranged by ball volume stays below O'Neil's majorant.
3. The largest delta in prod(l^2+c_j^2) - prod c_j^2 >= l^2 (l^2+delta)^{k-1}
   for a few (a, k); note that it grows with k.

Run:
    python demos/rearrangement_and_minorant.py
"""

import numpy as np

from cxhyp import harness, rearrange

rng = np.random.default_rng(0)
f = rearrange.WeightedSamples(rng.normal(size=8), rng.uniform(0.1, 1.0, 8))
fs = rearrange.decreasing_rearrangement(f)
print("f* breaks", np.round(fs.breaks, 3))
print("f* values", np.round(fs.values, 3))
for p, q in ((2.0, 1.0), (3.0, 2.0), (1.5, np.inf)):
    lo = rearrange.lorentz_norm(fs, p, q)
    hi = rearrange.lorentz_norm(fs, p, q, starred=True)
    print(f"p={p} q={q}: {lo:.4f} <= {hi:.4f} <= {p / (p - 1) * lo:.4f}")


def bump(radius):
    return lambda r: np.where(r < radius, (1 - (np.minimum(r, radius) / radius) ** 2) ** 3, 0.0)


rep = rearrange.oneil_pointwise_check(bump(1.5), bump(1.0), 2, [0.1, 1.0, 5.0], support=1.5)
for row in rep["rows"]:
    print(f"t={row['t']:5.2f} rho={row['rho']:.3f} (f*g)*={row['lhs']:.4e} bound={row['rhs']:.4e}")

for a in (0.0, 0.5, 1.0):
    deltas = [harness.minorant_delta(a, k).delta for k in (2, 3, 4)]
    print(f"a={a}: delta for k=2,3,4 =", ", ".join(f"{d:.6f}" for d in deltas))
