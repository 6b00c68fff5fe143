"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: input/parameter problems are data
errors (exit 3), estimator breakdowns are numerical failures (exit 4).
"""


class GarchMcError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(GarchMcError):
    """Malformed input data (bad cell, missing column, non-positive price)."""


class InsufficientDataError(GarchMcError):
    """Too few observations or samples for the requested operation."""


class DomainError(GarchMcError):
    """Arguments outside the operation's mathematical domain."""


class DegenerateCovarianceError(GarchMcError):
    """Covariance matrix not positive definite even after regularization."""


class DegenerateSeriesError(GarchMcError):
    """Series has zero variance where variation is required."""


class NonConvergenceError(GarchMcError):
    """An iterative estimator failed to satisfy its stopping rule."""
