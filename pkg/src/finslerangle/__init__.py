"""Finsleroid angle geometry on a Riemannian background."""

from .errors import (
    ConfigError,
    DomainError,
    FinslerError,
    NoConvergence,
    NumericalInconsistency,
    PoleCrossing,
    PoleProximity,
    SingularMetric,
    StepTooLarge,
    ZeroVector,
)

__version__ = "0.1.0"
