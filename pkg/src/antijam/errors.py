"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A scenario document or call argument violates a configuration invariant."""


class InstanceTooLargeError(RuntimeError):
    """A brute-force oracle was asked to enumerate past its configured cap."""


class UnsupportedOperationError(TypeError):
    """An operation was called on a game kind that does not define it."""
