"""
Exception hierarchy for the decoherence simulator.

Quadrature non-convergence is deliberately absent: it is reported through
IntegralResult.converged and never raised.
"""

from typing import Optional


class DecohereError(Exception):
    """Base class for all simulator errors."""


class DomainError(DecohereError, ValueError):
    """An argument lies outside the domain of an operation."""


class ParameterError(DecohereError, ValueError):
    """Scenario parameters are inconsistent with each other."""


class UndefinedRatioError(DecohereError, ArithmeticError):
    """The free-evolution decoherence factor is too small to divide by."""


class PresetNotFoundError(DecohereError, KeyError):
    """Requested preset id is not registered."""


class NoSolutionError(DecohereError):
    """
    No bracket containing a root was found.

    Carries the scanned bracket ends and the criterion values there so the
    caller can report how far from the target the search ended.
    """

    def __init__(
        self,
        message: str,
        lower: Optional[float] = None,
        upper: Optional[float] = None,
        lower_value: Optional[float] = None,
        upper_value: Optional[float] = None,
    ):
        super().__init__(message)
        self.lower = lower
        self.upper = upper
        self.lower_value = lower_value
        self.upper_value = upper_value
