"""Exception types shared across the package."""


class CxhypError(Exception):
    """Base class for all package errors."""


class DomainError(CxhypError, ValueError):
    """Argument outside the domain of a function (e.g. Gamma at x <= 0)."""


class ParameterError(CxhypError, ValueError):
    """Parameters outside the validity range of a formula."""


class RangeError(ParameterError):
    """Constant requested outside the range where its closed form holds."""


class DivergenceError(CxhypError, ArithmeticError):
    """A series or integral that does not converge for the given input."""


class ConvergenceError(CxhypError, ArithmeticError):
    """A convergent computation that failed to reach its tolerance."""


class QuadratureError(ConvergenceError):
    """Numerical integration did not meet its tolerance."""


class SingularPointError(CxhypError, ValueError):
    """Evaluation at a singular point of a map."""


class StencilError(CxhypError, ValueError):
    """Finite-difference stencil does not fit inside the lattice."""


class GridMismatchError(CxhypError, ValueError):
    """Sampled values do not match the grid they are attached to."""


class ResourceError(CxhypError, MemoryError):
    """Requested problem size is unreasonably large."""


class ZeroNormError(CxhypError, ValueError):
    """A normalizing integral vanished."""
