class ConfigError(ValueError):
    """Invalid or infeasible experiment configuration."""


class InsufficientSampleError(ValueError):
    """Too few observations for an asymptotic test."""


class InvariantError(RuntimeError):
    """Internal data-structure invariant was violated (e.g. unsorted stream)."""
