"""Exception and warning types shared across the package.

Every error that can surface through the command line carries a short
machine-parsable ``category`` and a process exit code, so scripts driving
the CLI can branch on failures without scraping prose.
"""


class ArtifactError(Exception):
    """Base class for all errors raised by this package."""

    category = "error"
    exit_code = 1


class InvalidParameterError(ArtifactError, ValueError):
    """A physical or numerical parameter is outside its allowed range."""

    category = "invalid-parameter"
    exit_code = 2


class ConfigError(ArtifactError, ValueError):
    """A run configuration file or override could not be parsed."""

    category = "config-parse"
    exit_code = 2


class GridMismatchError(ArtifactError, ValueError):
    """Two fields that must share a grid do not."""

    category = "grid-mismatch"
    exit_code = 2


class NumericsError(ArtifactError, RuntimeError):
    """The integration produced non-finite values."""

    category = "numerics"
    exit_code = 3


class FitFailureError(ArtifactError, RuntimeError):
    """A least-squares fit did not converge or its input was unusable."""

    category = "fit-failure"
    exit_code = 4


class OutputError(ArtifactError, OSError):
    """Reading or writing run artifacts failed."""

    category = "io"
    exit_code = 5


class RegimeWarning(UserWarning):
    """Parameters are valid but outside the regime the model assumes."""


class AccuracyWarning(UserWarning):
    """The requested step size is too coarse for the stated accuracy."""
