"""Exception and warning types shared across the package."""

from __future__ import annotations


class FloqtunnelError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(FloqtunnelError, ValueError):
    """A physical parameter is missing, non-finite, or out of range.

    Carries the offending parameter name in ``parameter``.
    """

    def __init__(self, parameter: str, message: str):
        self.parameter = parameter
        super().__init__(f"{parameter}: {message}")


class DomainError(FloqtunnelError, ValueError):
    """An operation was evaluated outside its mathematical domain."""


class NonConvergenceError(FloqtunnelError, RuntimeError):
    """An iterative computation failed to reach its tolerance."""


class SolverBreakdownError(FloqtunnelError, RuntimeError):
    """Both the banded and the dense linear solves failed."""


class DegenerateChannelError(FloqtunnelError, ZeroDivisionError):
    """A channel wavefunction value at x=0 is too small to divide by."""


class ScanError(FloqtunnelError, RuntimeError):
    """Too many points of a parameter scan failed to converge."""


class InstabilityError(FloqtunnelError, RuntimeError):
    """Time propagation lost more norm than the accepted bound."""


class ResolutionError(FloqtunnelError, ValueError):
    """A recorded time series is too short for the requested analysis."""


class RegimeError(FloqtunnelError, ValueError):
    """A comparison was requested for parameters where it is undefined."""


class RegimeWarning(UserWarning):
    """Parameters are outside the validity regime of an approximation."""


class ReflectionWarning(UserWarning):
    """Boundary echoes may reach the detector during the recording window."""
