"""Numerical toolkit for analysis on complex hyperbolic space.

Modules:
    specfun: gamma, hypergeometric and Jacobi functions and closed-form constants.
    geometry: ball and Siegel models, automorphisms, quadrature grids, radial convolution.
    diffops: finite-difference operators and identity checks.
    kernels: heat, Green and Bessel-Green-Riesz kernels and their tables.
    rearrange: rearrangements, Lorentz functionals and rearranged-kernel estimates.
    funkhecke: sphere integrals and Funk-Hecke eigenvalues.
    harness: command line and experiment reports.
"""

from . import diffops, funkhecke, geometry, kernels, rearrange, specfun
from .errors import CxhypError

__version__ = "0.1.0"

__all__ = ["CxhypError", "diffops", "funkhecke", "geometry", "kernels", "rearrange", "specfun"]
