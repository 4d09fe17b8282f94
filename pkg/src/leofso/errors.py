"""Exception types shared across the package."""


class LeoFsoError(Exception):
    """Base class for all package errors."""


class DomainError(LeoFsoError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class ConfigError(LeoFsoError, ValueError):
    """Invalid or inconsistent configuration."""


class NumericError(LeoFsoError, ArithmeticError):
    """A numerical routine failed to converge or overflowed.

    ``estimate`` and ``error_bound`` carry the best available result when the
    failing routine produced one.
    """

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound
