"""Exception types shared across the package."""


class InvalidDimensionError(ValueError):
    """Raised when an ambient or ball dimension is outside its valid range."""


class CurveSpecError(ValueError):
    """Raised when a curve specification fails validation or parsing."""


class PreconditionError(ValueError):
    """Raised when an operation's stated precondition does not hold."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge.

    Carries the best available estimate in ``estimate``.
    """

    def __init__(self, message, estimate):
        super().__init__(message)
        self.estimate = estimate


class ConfigError(ValueError):
    """Raised for invalid estimator or CLI configuration."""
