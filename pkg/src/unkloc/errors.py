"""Shared exception types."""


class ConfigError(ValueError):
    """Invalid configuration: bad family parameters, malformed config files,
    or preconditions (like threshold positivity) that make a run meaningless."""
