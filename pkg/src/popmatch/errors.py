"""Exception hierarchy shared by the library and the CLI."""


class PopMatchError(Exception):
    """Base class for all errors raised by popmatch."""


class InstanceError(PopMatchError, ValueError):
    """Malformed or invalid instance / matching input."""


class InfeasibleError(PopMatchError):
    """The instance admits no perfect matching."""


class EnumerationLimitError(PopMatchError):
    """Enumeration exceeded the configured cap (POPMATCH_MAX_ENUM)."""


class GenerationError(PopMatchError):
    """Random instance generation gave up after the retry bound."""


class InvariantViolation(PopMatchError, AssertionError):
    """An internal invariant failed; always indicates a bug."""
