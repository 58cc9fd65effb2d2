"""Exception types shared across the toolkit."""


class HardcoreError(Exception):
    """Base class for all toolkit errors."""


class DomainError(HardcoreError):
    """An input lies outside the mathematical domain of an operation."""


class ConvergenceError(HardcoreError):
    """An iterative solver hit its iteration cap before reaching tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ResourceError(HardcoreError):
    """A computation would exceed a configured size or cost cap."""


class CapacityError(HardcoreError):
    """A graph construction ran out of degree budget."""


class ConsistencyError(HardcoreError):
    """Structurally inconsistent inputs (sizes, labels, boundary data)."""


class ParseError(HardcoreError):
    """Malformed graph or eta file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class IntervalDomainError(DomainError):
    """An interval operation was applied outside its domain (division by an
    interval containing zero, log of a nonpositive interval, ...)."""
