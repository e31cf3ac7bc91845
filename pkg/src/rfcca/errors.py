"""Exception hierarchy shared by all rfcca modules."""


class RfccaError(Exception):
    """Base class for errors raised by this package."""


class ParameterError(RfccaError, ValueError):
    """An argument violates an operation's contract (range, shape, kind)."""


class DataError(RfccaError):
    """Ingestion failed or the data is degenerate for the requested operation."""


class NumericalError(RfccaError):
    """A computation left its valid numerical regime (singularity, bad eigenvalues)."""


class ConfigError(RfccaError):
    """An experiment configuration is invalid or inconsistent."""
