"""
Exception hierarchy shared by every edgelab module.
"""

import math
from typing import Any


class EdgeLabError(Exception):
    """Base class for all edgelab errors."""


class InvalidParameterError(EdgeLabError, ValueError):
    """A parameter lies outside the range an operation is defined on."""


class NotSymmetricError(InvalidParameterError):
    """A matrix handed to the eigensolver is not finite and symmetric."""


class DimensionMismatchError(EdgeLabError, ValueError):
    """Two objects that must live in the same dimension do not."""


class BarrierViolationError(EdgeLabError):
    """
    A barrier sits on the wrong side of the spectrum.

    Attributes:
        barrier: The offending barrier position
        edge: The spectral edge it had to stay away from
    """

    def __init__(self, message: str, *, barrier: float = math.nan, edge: float = math.nan):
        super().__init__(message)
        self.barrier = barrier
        self.edge = edge


class SingularUpdateError(EdgeLabError):
    """The Sherman-Morrison denominator 1 + x^T (A - u)^{-1} x vanishes."""


class InvariantViolationError(EdgeLabError):
    """
    A hard invariant of a barrier walk failed.

    Attributes:
        violations: The walk's violation log up to the failure
    """

    def __init__(self, message: str, violations: list[Any] | None = None):
        super().__init__(message)
        self.violations = violations or []


class ConfigError(EdgeLabError):
    """An experiment configuration is invalid or inconsistent."""
