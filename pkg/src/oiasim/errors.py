"""Exception types raised across the package."""


class OIAError(Exception):
    """Base class for all package errors."""


class NotHermitian(OIAError, ValueError):
    """Input to a Hermitian routine is not Hermitian within tolerance."""


class RankDeficient(OIAError, ValueError):
    """A matrix expected to have full column rank does not."""


class ShapeMismatch(OIAError, ValueError):
    """Operands have incompatible shapes."""


class InvalidParams(OIAError, ValueError):
    """Parameters violate a documented side condition."""


class EmptyGroup(OIAError, ValueError):
    """A user group with no members was passed to a selection rule."""


class WindowTooNarrow(OIAError, ValueError):
    """Fewer than two SNR points fall inside a regression window."""


class InvalidShape(OIAError, ValueError):
    """Shape parameters of a flop-count formula are out of range."""


class ConfigError(OIAError, ValueError):
    """An experiment or system configuration failed validation."""
