"""Exception hierarchy shared across the engine."""


class LazyfolioError(Exception):
    """Base class for every error raised by this package."""


class IngestError(LazyfolioError):
    """A price file could not be parsed into a usable series."""


class AlignmentError(LazyfolioError):
    """Two series cannot be joined on a common trading calendar."""


class DomainError(LazyfolioError):
    """An input value is outside the mathematical domain of an operation."""


class InsufficientDataError(LazyfolioError):
    """Not enough observations to run the requested computation."""


class ContractError(LazyfolioError):
    """A caller violated an operation's precondition."""


class ConvergenceError(LazyfolioError):
    """Iterative estimation hit its cap without meeting the step tolerance.

    Carries the best parameters found so far in ``best_params``.
    """

    def __init__(self, message, best_params=None):
        super().__init__(message)
        self.best_params = best_params


class ConditioningError(LazyfolioError):
    """Normal equations were too close to singular to solve reliably."""


class SelectionError(LazyfolioError):
    """Every candidate in a model-order grid failed to fit.

    ``failures`` maps (p, q) to the exception raised for that cell.
    """

    def __init__(self, message, failures=None):
        super().__init__(message)
        self.failures = failures or {}


class PsdViolationError(LazyfolioError):
    """A covariance quadratic form evaluated materially below zero."""


class DegenerateFrontierError(LazyfolioError):
    """Every sampled portfolio has zero risk; no tangency point exists."""


class ConfigError(LazyfolioError):
    """A run configuration value is missing, malformed, or inconsistent."""
