"""Exception hierarchy shared by all modules."""


class VeroneseError(Exception):
    """Base class for library errors."""


class InvalidSpec(VeroneseError, ValueError):
    """A construction or configuration parameter is outside its domain."""


class PrecisionExhausted(VeroneseError):
    """A certified answer could not be reached within the allowed truncation depth."""


class AmbiguousDistance(PrecisionExhausted):
    """The enclosure is too wide to decide the nearest integer; deepen and retry."""


class PreconditionViolated(VeroneseError):
    """An operation was called outside the regime where its statement applies."""


class ExactHit(VeroneseError):
    """A distance to the nearest integer is exactly zero."""


class BoxTooLarge(VeroneseError):
    """An exhaustive enumeration exceeds the configured cap."""


class NoApplicableResult(VeroneseError):
    """No closed form is known for the requested parameter regime."""
