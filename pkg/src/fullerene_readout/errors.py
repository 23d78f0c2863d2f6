"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A configuration document violated the schema or an invariant."""


class NumericFailure(RuntimeError):
    """An integrator diagnostic tripped (e.g. trace drift)."""
