"""Exception hierarchy.

Data problems (bad shapes, malformed files, degenerate samples) derive from
:class:`DataError`; numerical breakdowns derive from :class:`NumericalError`.
The CLI maps the two families to distinct exit codes.
"""


class RankAggError(Exception):
    """Base class for all errors raised by this package."""


class DataError(RankAggError, ValueError):
    """Input data is invalid for the requested operation."""


class DimensionError(DataError):
    """Array or ranking sizes do not agree."""


class EmptyInputError(DataError):
    """A dataset or file contains no rankings."""


class ValidationError(DataError):
    """A ranking is not a permutation of the alternatives."""


class ParseError(DataError):
    """A file could not be parsed; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DegenerateDataError(DataError):
    """The maximum-likelihood estimate does not exist for this data."""


class CapacityError(RankAggError, ValueError):
    """The requested exact computation is too large."""


class IntervalError(RankAggError, ValueError):
    """An empty truncation interval was requested."""


class NumericalError(RankAggError, ArithmeticError):
    """A numerical routine failed to produce a usable answer."""


class DegenerateLikelihoodWarning(RuntimeWarning):
    """A likelihood or estimate hit a boundary and was clamped."""
