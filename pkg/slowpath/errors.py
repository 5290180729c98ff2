"""
Exception types raised by slowpath.

Library code raises these; only the CLI and the experiment runner catch them.
"""


class SlowpathError(Exception):
    """Base class for every error raised by slowpath."""


class InvalidArgumentError(SlowpathError, ValueError):
    """An argument violates an operation's precondition."""


class DecodeStateError(SlowpathError, RuntimeError):
    """A cache or session is used in a state that does not allow the call."""


class ConfigError(SlowpathError, ValueError):
    """A configuration file or override is malformed or out of range."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


def require(condition, message):
    """Raise InvalidArgumentError with ``message`` unless ``condition`` holds."""
    if not condition:
        raise InvalidArgumentError(message)
