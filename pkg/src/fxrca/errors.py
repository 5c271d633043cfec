"""Exception hierarchy shared across the toolkit.

Input problems (bad config values, malformed CSV files) and computation
problems (collinear designs, failed identification, numerical domain
violations) are kept on separate branches so the command-line layer can
map them to distinct exit codes.
"""


class ToolkitError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(ToolkitError):
    """Invalid configuration value or missing/unknown configuration key."""


class SchemaError(ConfigError):
    """Malformed input data: missing columns, duplicates, unparseable cells."""


class ComputationError(ToolkitError):
    """A requested computation cannot be carried out on the given inputs."""


class DomainError(ComputationError):
    """Numeric argument outside the mathematical domain of an operation."""


class CollinearityError(ComputationError):
    """Design matrix is rank deficient; the message names offending columns."""


class IdentificationError(ComputationError):
    """Requested model has no identifying variation in the data."""


class ConvergenceError(ComputationError):
    """An iterative routine failed to reach its stopping criterion."""
