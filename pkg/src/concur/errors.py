"""Exception hierarchy shared across the package."""


class ConcurError(Exception):
    """Base class for all package-specific errors."""


class DomainError(ConcurError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class CapabilityError(ConcurError, NotImplementedError):
    """The requested (model, dimension, method) combination is unsupported.

    Raised instead of silently approximating, e.g. a trivariate exponent
    function for a model where only the bivariate closed form is known.
    """


class NumericError(ConcurError, ArithmeticError):
    """A numerical routine could not produce a reliable result."""


class ParseError(ConcurError, ValueError):
    """Malformed input data; the message names the offending line."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
