"""Exception types shared across the package.

The CLI reports ``type(exc).__name__`` as the machine-readable error class,
so the names here are part of the command-line contract.
"""


class ChallengeRankingError(Exception):
    """Base class for all errors raised by this package."""


class InputError(ChallengeRankingError, ValueError):
    """Malformed or inconsistent input (shape mismatch, bad value, bad file)."""


class MetricUndefined(ChallengeRankingError):
    """A metric has no value for the given operands (e.g. empty point set)."""


class AggregationUndefined(ChallengeRankingError):
    """Nothing left to aggregate; a missing-data policy must intervene."""


class TauUndefined(ChallengeRankingError):
    """Kendall's tau is undefined because one ranking has zero variance."""


class PreconditionError(ChallengeRankingError):
    """An analysis precondition is violated; ``criteria`` names which ones."""

    def __init__(self, message, criteria=()):
        super().__init__(message)
        self.criteria = tuple(criteria)


class SchemaParseError(ChallengeRankingError):
    """A challenge-description document could not be parsed."""

    def __init__(self, message, line=None, column=None):
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + loc)
        self.line = line
        self.column = column


class SchemaValidationError(ChallengeRankingError):
    """A challenge-description document does not match the registry."""
