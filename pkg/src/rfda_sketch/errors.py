"""Exception types raised across the package."""


class RfdaError(Exception):
    """Base class for every error raised by this package."""


class ShapeMismatch(RfdaError, ValueError):
    pass


class ZeroMatrix(RfdaError, ValueError):
    pass


class NonPositiveLambda(RfdaError, ValueError):
    pass


class EmptyClass(RfdaError, ValueError):
    pass


class ClassTooSmall(RfdaError, ValueError):
    pass


class BadSpectrum(RfdaError, ValueError):
    pass


class MissingLabelColumn(RfdaError, KeyError):
    pass


class ParseError(RfdaError, ValueError):
    """A CSV cell could not be parsed; ``row`` is the 1-based file line."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class DegenerateDistribution(RfdaError, ValueError):
    pass


class SketchTooLarge(RfdaError, ValueError):
    pass


class RankTooLarge(RfdaError, ValueError):
    pass


class SketchRankDeficient(RfdaError, ArithmeticError):
    pass


class ZeroReference(RfdaError, ValueError):
    pass


class EpsilonTooLarge(RfdaError, ValueError):
    pass


class SpectralNormExceedsOne(RfdaError, ValueError):
    pass


class ConfigError(RfdaError, ValueError):
    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key

    def __str__(self):
        message = super().__str__()
        return f"{self.key}: {message}" if self.key else message
