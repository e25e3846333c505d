"""Exception and warning classes shared across the package."""


class DomainError(ValueError):
    """Quantum numbers or arguments outside the domain of an operation."""


class PreconditionError(ValueError):
    """A documented precondition (index guard, grid size, ...) was violated."""


class BandlimitError(PreconditionError):
    """A sphere grid is too coarse for an exact symbol/operator roundtrip."""


class QuadratureError(RuntimeError):
    """Numerical quadrature did not reach the requested accuracy."""


class TruncationWarning(UserWarning):
    """The Fock-space truncation is too small for the requested displacement."""


class AngleOverflowWarning(UserWarning):
    """A contracted rotation angle exceeds pi."""
