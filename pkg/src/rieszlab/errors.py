"""Exception hierarchy shared by all numerical modules."""


class RieszLabError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RieszLabError, ValueError):
    """An argument lies outside the region where the operation is defined."""


class PoleError(DomainError):
    """Evaluation at a pole of a meromorphic function."""


class ParameterError(DomainError):
    """Invalid parameter list (e.g. a lower hypergeometric parameter at a pole)."""


class PrecisionLoss(RieszLabError, ArithmeticError):
    """Cancellation in a series exceeded the configured guard."""


class ConvergenceError(RieszLabError, ArithmeticError):
    """A series is outside its disc of convergence or failed to converge."""


class NoConvergence(RieszLabError, ArithmeticError):
    """Quadrature budget exhausted with the error estimate above tolerance."""

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class FitError(RieszLabError, ArithmeticError):
    """A least-squares exponent fit has residuals above its threshold."""


class ParseError(RieszLabError, ValueError):
    """Malformed configuration document."""

    def __init__(self, message, line=None, column=None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class ValidationError(RieszLabError, ValueError):
    """A configuration value violates its invariant."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
