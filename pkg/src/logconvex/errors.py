"""Exception hierarchy shared by every module in the package."""


class LogConvexError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(LogConvexError):
    """Malformed scenario file or unknown check name."""


class UnsupportedWeightError(LogConvexError, ValueError):
    """The requested weight cannot be evaluated on this kind of data."""


class NumericalGuardError(LogConvexError):
    """A numerical safety guard tripped (aliasing, tails, quadrature)."""


class AliasingGuardError(NumericalGuardError):
    """Sampled field is not small enough at the periodic box boundary."""


class TailDominanceError(NumericalGuardError):
    """Weighted integrand is not negligible at the box boundary."""


class QuadratureError(NumericalGuardError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class EndpointInfiniteError(LogConvexError):
    """A norm on the right-hand side of an inequality is infinite."""


class StepSizeError(NumericalGuardError):
    """ODE integration aborted (step size underflow)."""
