"""Exception hierarchy.

Every error raised on bad data or bad configuration derives from
:class:`MfdxaError`; the CLI maps those to exit code 1. Broken internal
invariants raise :class:`InvariantViolation` (exit code 2).
"""


class MfdxaError(ValueError):
    """Base class for data and configuration errors."""


class NonPositiveValue(MfdxaError):
    pass


class TooShort(MfdxaError):
    pass


class ZeroVariance(MfdxaError):
    pass


class NonMonotonicTimestamps(MfdxaError):
    pass


class SeriesTooShort(MfdxaError):
    pass


class DegenerateGrid(MfdxaError):
    pass


class ScaleOutOfRange(MfdxaError):
    pass


class UnderDetermined(MfdxaError):
    pass


class LengthMismatch(MfdxaError):
    pass


class EmptySurface(MfdxaError):
    pass


class NonPositiveVariance(MfdxaError):
    pass


class InsufficientScales(MfdxaError):
    pass


class InsufficientMoments(MfdxaError):
    pass


class LagOutOfRange(MfdxaError):
    pass


class InvalidLevel(MfdxaError):
    pass


class ZeroDenominator(MfdxaError):
    pass


class InvalidSpec(MfdxaError):
    pass


class EmbeddingFailure(MfdxaError):
    """Circulant embedding produced negative eigenvalues."""


class ParseError(MfdxaError):
    """Input file could not be parsed; carries row and column."""

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)


class ConfigError(MfdxaError):
    pass


class UnknownFigure(MfdxaError):
    pass


class InvariantViolation(RuntimeError):
    """An internal consistency check failed."""
