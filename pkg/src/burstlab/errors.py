"""Exception types raised across burstlab."""


class BurstlabError(Exception):
    """Base class for all burstlab errors."""


class ConfigurationError(BurstlabError, ValueError):
    """A parameter is outside the range an operation accepts."""


class DataError(BurstlabError):
    """Input data cannot be used (missing file, bad header, ...)."""


class InsufficientSpikesError(BurstlabError, ValueError):
    """Too few spikes for the requested statistic."""

    def __init__(self, message, tag=None, n_spikes=None):
        super().__init__(message)
        self.tag = tag
        self.n_spikes = n_spikes


class InvariantViolationError(BurstlabError, ValueError):
    """A value breaks an invariant of its type (e.g. non-positive ISI)."""


class InfeasibleSampleError(BurstlabError, ValueError):
    """More spikes requested than the sampling pool holds."""


class QuantizationWarning(UserWarning):
    """Integer-second quantization dropped a large share of generated spikes."""
