"""Exception hierarchy.

Two branches matter for the CLI exit-code contract: ``ValidationError``
(bad inputs or configuration, exit code 2) and ``NumericalError``
(a computation that could not be completed, exit code 3).
"""


class GsparseError(Exception):
    """Base class for all library errors."""


class ValidationError(GsparseError):
    """Invalid inputs, shapes, or configuration."""


class NumericalError(GsparseError):
    """A numerical procedure failed or produced unusable values."""


class NotPositiveDefinite(NumericalError):
    """Symmetric factorization hit a non-positive pivot."""


class RankDeficient(NumericalError):
    """Matrix does not have full row rank at the working tolerance."""


class QuadratureFailure(NumericalError):
    """Adaptive quadrature could not meet tolerance within its budget."""


class NotInvertible(NumericalError):
    """x -> R(x)/x^2 is not strictly monotone on the probed grid."""


class DegenerateWeights(NumericalError):
    """A reweighted solve received a non-positive or non-finite weight."""


class NonFiniteIterate(NumericalError):
    """An iterate or weight vector left the representable range."""


class DegenerateInput(ValidationError):
    """Argument outside the operation's domain (e.g. t <= 0)."""


class OutOfRange(ValidationError):
    """Index or order statistic outside the valid range."""


class TooLarge(ValidationError):
    """Problem size exceeds a brute-force oracle's hard limit."""


class MissingNoiseVariance(ValidationError):
    """Operation requires a problem with a noise variance attached."""


class InvalidSpec(ValidationError):
    """Malformed problem, regularizer, or sweep specification."""


class ParseError(ValidationError):
    """Malformed CSV/JSON input."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column


class DimensionMismatch(ValidationError):
    """Shapes of related objects are inconsistent."""
