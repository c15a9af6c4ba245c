"""Exception types raised by the package."""


class DressedDoubletsError(Exception):
    """Base class for all package errors."""


class ConvergenceError(DressedDoubletsError):
    """An iterative procedure stopped before reaching its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NumericalError(DressedDoubletsError):
    """Non-finite values or norm drift during time propagation."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class GaugeError(DressedDoubletsError):
    """Eigenvector sign convention could not be fixed."""


class ConfigError(DressedDoubletsError):
    """Invalid experiment configuration."""
