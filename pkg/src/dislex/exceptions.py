"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`DislexError`.
Most also derive from :class:`ValueError` so that callers who only know the
scikit-learn conventions can still catch them.
"""


class DislexError(Exception):
    """Base class for all package errors."""


# -- ingestion ---------------------------------------------------------------


class EmptyInput(DislexError, ValueError):
    pass


class DimensionMismatch(DislexError, ValueError):
    def __init__(self, line, expected, got):
        self.line = line
        self.expected = expected
        self.got = got
        super().__init__(f"line {line}: expected {expected} values, got {got}")


class NonFiniteValue(DislexError, ValueError):
    def __init__(self, line, word):
        self.line = line
        self.word = word
        super().__init__(f"line {line}: non-finite value in vector for {word!r}")


class MissingColumn(DislexError, ValueError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"required column {column!r} is missing")


class InvalidEnumValue(DislexError, ValueError):
    def __init__(self, row, column, token):
        self.row = row
        self.column = column
        self.token = token
        super().__init__(f"row {row}: invalid value {token!r} for column {column!r}")


class InvalidWord(DislexError, ValueError):
    pass


class EmptyJoin(DislexError, ValueError):
    pass


class InfeasibleSplit(DislexError, ValueError):
    pass


# -- cues --------------------------------------------------------------------


class EmptyWord(DislexError, ValueError):
    pass


class BadOrder(DislexError, ValueError):
    pass


# -- numerics ----------------------------------------------------------------


class NonFiniteInput(DislexError, ValueError):
    pass


class ShapeMismatch(DislexError, ValueError):
    pass


class ZeroVariance(DislexError, ValueError):
    pass


class ZeroNorm(DislexError, ValueError):
    pass


# -- production --------------------------------------------------------------


class NoPath(DislexError):
    pass


class EmptyEvaluation(DislexError, ValueError):
    pass


# -- semantic space analyses -------------------------------------------------


class SingularCovariance(DislexError, ValueError):
    pass


class ClassTooSmall(DislexError, ValueError):
    pass


class EmptyLabels(DislexError, ValueError):
    pass


class NoPairs(DislexError, ValueError):
    pass


class PerplexityTooLarge(DislexError, ValueError):
    pass


class DegenerateCountsWarning(UserWarning):
    """Pooled proportion is 0 or 1; the test statistic is undefined."""


# -- cli ---------------------------------------------------------------------


class UnknownFeature(DislexError, ValueError):
    pass


class TooManyClasses(DislexError, ValueError):
    pass


class ConfigError(DislexError, ValueError):
    pass


# the degenerate-counts condition is reported as a warning, not raised
DegenerateCounts = DegenerateCountsWarning
