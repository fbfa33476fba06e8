"""Exception types shared across the library."""


class Sl2HeatError(Exception):
    """Base class for all library-specific errors."""


class BoundaryMassError(Sl2HeatError):
    """Integrand carries too much mass at the edge of a truncated Haar box."""


class DomainError(Sl2HeatError):
    """Argument outside the mathematical domain of an operation."""


class SpectrumMismatchError(Sl2HeatError):
    """Representation point does not couple to the requested K-type."""


class ConvergenceError(Sl2HeatError):
    """A series or quadrature failed to converge within its budget."""


class SingularityError(Sl2HeatError):
    """Parameter hit a pole of the function being evaluated."""


class WeightError(Sl2HeatError):
    """Requested weight lies outside the weight set of the representation."""


class RouteError(Sl2HeatError):
    """Evaluation route cannot handle the requested matrix element."""


class TailError(Sl2HeatError):
    """K-type truncation cannot reach the requested tolerance."""
