"""Exceptions raised by snrgsim.

Every error a user can trigger derives from `SnrgError`; the command line maps `ConfigError` to
exit code 1 and all others to exit code 2.
"""


class SnrgError(Exception):
    pass


class DomainError(SnrgError, ValueError):
    """An argument lies outside the physical or geometric domain of an operation."""


class NoCrossingError(SnrgError):
    """A fidelity curve never drops below the bandwidth threshold."""


class OnResonanceFailure(SnrgError):
    """The on-resonance fidelity is already at or below the bandwidth threshold."""


class UnidentifiableError(SnrgError):
    """Observed data carry no information about the fitted parameters."""


class UndersamplingError(SnrgError):
    """The sample rate cannot resolve the highest instantaneous carrier frequency."""


class ConfigError(SnrgError):
    def __init__(self, key: str, msg: str):
        self.key = key
        super().__init__(f"[{key}] {msg}")
