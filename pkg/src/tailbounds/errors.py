"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the hypotheses under which a quantity is defined.

    Raised instead of extrapolating: every bound in this package is an
    inequality with explicit preconditions, and returning a number outside
    those preconditions would silently produce an unproven claim.
    """


class ConfigError(ValueError):
    """A verification-grid configuration document is malformed or names an
    unknown suite, or describes an empty grid."""
