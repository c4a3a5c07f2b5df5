"""Exception hierarchy shared by all modules."""


class CapflowError(Exception):
    """Base class for every error raised by capflow."""


class DomainError(CapflowError, ValueError):
    """An argument lies outside the domain of the operation."""


class GeometryError(CapflowError):
    """A state or point does not describe a valid embedded configuration."""


class ConvexityLossError(GeometryError):
    """Strict convexity failed (some principal curvature is not positive)."""


class BlowUpError(CapflowError, ArithmeticError):
    """A time step produced non-finite values."""


class InvalidInitialDataError(GeometryError):
    """Initial data failed validation. The failing report is attached."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
