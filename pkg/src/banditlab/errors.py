class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UsageError(ValueError):
    """An API or CLI was driven in a way its contract forbids."""


class ConfigError(UsageError):
    """An experiment configuration field is missing or invalid."""
