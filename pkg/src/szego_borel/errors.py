"""
Exception hierarchy for szego_borel.

Every error raised on purpose by the library derives from ``LabError`` so
callers (and the command line front end) can tell numerical refusals apart
from programming errors.
"""


class LabError(Exception):
    """Base class for all library errors."""
    pass


class DomainError(LabError, ValueError):
    """Raised when an input lies outside the domain of an operation."""
    pass


class ConvergenceError(LabError):
    """Raised when a quadrature or a series fails to reach its tolerance."""
    pass


class DivergenceError(ConvergenceError):
    """Raised when an improper integral is detected not to decay."""
    pass


class PrecisionLossError(ConvergenceError):
    """Raised when cancellation leaves fewer digits than requested."""

    def __init__(self, message: str, largest_term: float = 0.0, total: float = 0.0):
        super().__init__(message)
        self.largest_term = largest_term
        self.total = total


class NonFiniteIntegrandError(LabError, ArithmeticError):
    """Raised when an integrand returns inf or nan at a quadrature node."""

    def __init__(self, node: complex):
        super().__init__(f"Non-finite integrand value at node {node!r}")
        self.node = node


class ConsistencyError(LabError):
    """Raised when an internal consistency check fails."""
    pass
