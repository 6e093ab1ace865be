"""Exception types raised by the library."""


class FinslerError(Exception):
    """Base class for all library errors."""


class DomainError(FinslerError, ValueError):
    """A jet primitive was evaluated outside its domain."""


class SingularMetric(FinslerError):
    """The background metric is singular (or not positive definite) at a point."""


class ZeroVector(FinslerError, ValueError):
    pass


class PoleProximity(FinslerError, ValueError):
    """The tangent vector lies too close to the +b / -b pole directions."""


class NoConvergence(FinslerError):
    pass


class NumericalInconsistency(FinslerError):
    """A quantity left its mathematically allowed range by more than rounding."""


class PoleCrossing(FinslerError):
    """A transported vector entered the pole guard."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class StepTooLarge(FinslerError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ConfigError(FinslerError, ValueError):
    pass
