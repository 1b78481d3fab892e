"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A model, cone, region or experiment configuration is invalid."""


class NumericError(RuntimeError):
    """A numeric procedure failed to meet its accuracy contract."""
