"""Exception types shared across the package."""


class InputLengthError(ValueError):
    """A bit or sample sequence has the wrong length."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigError(ValueError):
    """An experiment configuration is invalid."""


class CapabilityError(ConfigError):
    """The requested detector does not support this configuration."""
