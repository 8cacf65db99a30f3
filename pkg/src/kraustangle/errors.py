"""Exception types raised by the package."""


class KrausError(ValueError):
    """A Kraus pair or a unitary failed validation."""


class DomainError(ValueError):
    """A parameter lies outside the domain where a formula is defined."""


class ConsistencyError(RuntimeError):
    """A computed quantity violates a property it must satisfy.

    Raised instead of silently clamping when the violation is larger than
    floating-point noise, since that points to a bug upstream.
    """


class ConvergenceError(ArithmeticError):
    """An iterative numerical routine did not converge."""
