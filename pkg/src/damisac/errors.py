"""Exception types shared across the package."""


class DamIsacError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(DamIsacError, ValueError):
    """Invalid or inconsistent configuration input."""


class InfeasibleError(DamIsacError, ValueError):
    """A constraint set that cannot be satisfied (e.g. too few antennas,
    or a sensing threshold above the zero-forcing ceiling)."""
