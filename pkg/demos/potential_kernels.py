"""Tabulate a Bessel-Green-Riesz kernel and look at both ends of its profile.

Near the origin k_{zeta,alpha} behaves like the Euclidean Riesz kernel
rho^{alpha-2n} / gamma_{2n}(alpha); far out it decays like
rho^{alpha/2-1} e^{-(zeta+n) rho}. The two quadrature routes (through the heat
kernel and through the Bessel moments) are printed side by side, and the
table is written as CSV with a JSON sidecar.

Run:
    python demos/potential_kernels.py [outdir]
"""

import os
import sys

import numpy as np

from cxhyp import kernels, specfun

n, alpha, zeta = 2, 1.0, 0.5
out = sys.argv[1] if len(sys.argv) > 1 else "demo_output"

rho = np.array([1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0])
mel = kernels.bgr_kernel(zeta, alpha, rho, n, route="mellin")
bes = kernels.bgr_kernel(zeta, alpha, rho, n, route="bessel")
riesz = rho ** (alpha - 2 * n) / specfun.riesz_gamma(2 * n, alpha)
tail = rho ** (alpha / 2 - 1) * np.exp(-(zeta + n) * rho)
print(f"{'rho':>7} {'mellin':>12} {'bessel':>12} {'k/riesz':>9} {'k/tail':>9}")
for r, m, b, s, t in zip(rho, mel, bes, riesz, tail):
    print(f"{r:7.3f} {m:12.5e} {b:12.5e} {m / s:9.4f} {m / t:9.4f}")

small = np.geomspace(1e-4, 1e-3, 6)
large = np.linspace(4.0, 16.0, 13)
print("small-rho exponent", kernels.fit_power(small, kernels.bgr_kernel(zeta, alpha, small, n)),
      "expected", alpha - 2 * n)
print("decay rate", kernels.fit_decay(large, kernels.bgr_kernel(zeta, alpha, large, n))[0],
      "expected", zeta + n)

tab = kernels.kernel_table("k_zeta_alpha", n, alpha=alpha, zeta=zeta)
os.makedirs(out, exist_ok=True)
with open(os.path.join(out, "k_zeta_alpha.csv"), "w") as fh:
    fh.write(tab.to_csv())
with open(os.path.join(out, "k_zeta_alpha.json"), "w") as fh:
    fh.write(tab.sidecar())
print("table of", len(tab.grid), "nodes written to", out)
