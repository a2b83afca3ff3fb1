"""Exception hierarchy shared by the certification modules."""


class CertificationError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CertificationError, ValueError):
    """An operand lies outside the domain of an interval operation."""


class NonFiniteError(CertificationError, ArithmeticError):
    """An interval with an infinite endpoint reached an operation that needs finite input."""


class InvalidSampleError(CertificationError, ValueError):
    """Malformed or negative sample input."""


class NotApplicableError(CertificationError, ValueError):
    """The requested check is undefined for this sample size."""


class ConfigError(CertificationError, ValueError):
    """Invalid run parameters (grids, tolerances, precisions)."""


class InconclusiveError(CertificationError):
    """Interval widths stayed too large after every allowed precision escalation."""

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


class DepthCapExceeded(CertificationError):
    """Series truncation did not reach the tolerance before the depth cap."""

    def __init__(self, message, last_remainder=None):
        super().__init__(message)
        self.last_remainder = last_remainder


class InternalContradiction(CertificationError, AssertionError):
    """A certified result contradicts a proven inequality. Always a defect."""
