"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SchemaError(ValueError):
    """Parameters, models or datasets do not agree with each other."""


class DatasetError(ValueError):
    """A dataset file could not be parsed or violates a dataset invariant."""


class ConfigError(ValueError):
    """A run configuration is malformed or references missing inputs."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to produce a usable result."""


class StarvationError(NumericalError):
    """Rejection sampling ran out of attempts before collecting enough samples."""

    def __init__(self, message, accepted, attempts):
        super().__init__(message)
        self.accepted = accepted
        self.attempts = attempts

    @property
    def acceptance_rate(self):
        return self.accepted / self.attempts if self.attempts else 0.0
