"""Exception hierarchy shared across the package."""


class LyapFvError(Exception):
    """Base class for all package errors."""


class ValidationError(LyapFvError, ValueError):
    """A domain object was constructed from invalid inputs."""


class ConfigError(LyapFvError):
    """A run configuration failed to parse or validate."""


class InputDataError(LyapFvError):
    """Externally supplied data (prescribed controls, tables) ran out or is malformed."""


class NumericalError(LyapFvError):
    """A numerical consistency check failed at runtime."""


class TheoremPreconditionError(LyapFvError):
    """A decay bound was requested but its preconditions are not met."""


class UndefinedOrderError(LyapFvError):
    """An order of convergence is undefined (zero error on some level)."""
