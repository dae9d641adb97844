"""Domain errors.

Class names double as the error strings the CLI prints, so they are kept
short and without an ``Error`` suffix.
"""


class DqcError(Exception):
    """Base class for every domain error raised by this package."""

    @property
    def name(self) -> str:
        return type(self).__name__


class NotSquare(DqcError):
    pass


class NotHermitian(DqcError):
    pass


class NotPSD(DqcError):
    pass


class NotUnitary(DqcError):
    pass


class NotContraction(DqcError):
    pass


class DimensionMismatch(DqcError):
    pass


class UnnormalizedInput(DqcError):
    pass


class SlitOutOfRange(DqcError):
    pass


class ZeroProbabilityProjection(DqcError):
    """A projection whose target slice carries (numerically) no weight."""

    def __init__(self, message: str, probability: float = 0.0):
        super().__init__(message)
        self.probability = probability


class AllZeroWeights(DqcError):
    pass


class TooManyWeights(DqcError):
    pass


class NegativeWeight(DqcError):
    pass


class BadTruncation(DqcError):
    pass


class LengthMismatch(DqcError):
    pass


class BadProbability(DqcError):
    pass


class SpectrumOutOfRange(DqcError):
    pass


class BadLowerBound(DqcError):
    pass


class BadParameters(DqcError):
    pass


class DegenerateGroundState(DqcError):
    pass


class InvalidProgram(DqcError):
    pass


class InvalidInput(DqcError):
    """Unreadable or malformed input file."""
