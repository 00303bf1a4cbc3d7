"""Exception hierarchy shared by all modules."""


class TensorESDError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(TensorESDError, ValueError):
    """Malformed input: bad shapes, out-of-range indices, invalid parameters."""


class DomainError(ValidationError):
    """A spectral argument lies outside the upper half-plane (or other domain)."""


class BinomialOverflowError(TensorESDError, OverflowError):
    """A binomial coefficient does not fit in an unsigned 64-bit integer."""


class ResourceError(TensorESDError):
    """A computation would exceed its configured memory or enumeration budget."""


class NumericError(TensorESDError, ArithmeticError):
    """A numerical routine failed to converge or produced an excessive residual.

    Attributes
    ----------
    diagnostics : dict
        Free-form details (iteration counts, residuals, offending point).
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class ConvergenceError(NumericError):
    """An iterative solver hit its iteration cap."""


class InvariantError(NumericError):
    """A mathematically guaranteed property was violated by a computed value."""
