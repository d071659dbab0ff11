"""Exception types shared across the package."""


class TsplitError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(TsplitError, ValueError):
    """A parameter is outside its allowed domain."""


class InsufficientDataError(TsplitError):
    """Not enough observations for the requested computation."""


class SingularDesignError(TsplitError):
    """A Gram matrix is singular or numerically near-singular."""


class SelectionFailureError(TsplitError):
    """No candidate model could be selected."""


class BootstrapInstabilityError(TsplitError):
    """Too many bootstrap replicates were rejected for singular Grams."""


class ConfigError(TsplitError):
    """An experiment configuration is malformed or out of range."""


class ExperimentError(TsplitError):
    """An experiment aborted (for example, too many failed replications)."""
