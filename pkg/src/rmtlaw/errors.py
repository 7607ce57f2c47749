"""Exception types shared across the package."""


class RmtlawError(Exception):
    """Base class for all package errors."""


class BoundError(RmtlawError, ValueError):
    """An exhaustive-enumeration or series-order cap was exceeded."""


class DomainError(RmtlawError, ValueError):
    """An argument lies outside the operation's domain."""


class ParseError(RmtlawError, ValueError):
    """A text form (partition, model string, report) failed to parse."""


class UnsupportedModelError(RmtlawError, ValueError):
    """The operation is not defined for this model variant."""


class NumericError(RmtlawError, RuntimeError):
    """A numerical routine failed to converge or factorize."""


class BudgetError(RmtlawError, RuntimeError):
    """A run exceeds the configured compute budget."""
