"""Exception types shared across the package."""


class BmsError(Exception):
    """Base class for all package errors."""


class ConfigError(BmsError, ValueError):
    """Invalid or unknown configuration value."""


class NumericalError(BmsError, RuntimeError):
    """A solver failed or a numerical precondition was violated."""


class ScaleExceededError(BmsError, ValueError):
    """Requested system is too large for the brute-force oracle."""


class UndefinedAtZeroError(BmsError, ValueError):
    """The transition rate at zero frequency is divergent and no override is set."""


class UnreachableError(BmsError):
    """The ground-state threshold is never reached.

    Raised for non-ergodic dynamics whose stationary ground population stays
    below the requested threshold.
    """

    def __init__(self, stationary: float, threshold: float):
        self.stationary = stationary
        self.threshold = threshold
        super().__init__(
            f"stationary ground population {stationary:.6g} is below threshold {threshold:.6g}"
        )


class GridTooCoarseError(NumericalError):
    """The sampled intensity does not resolve the emission peak."""
