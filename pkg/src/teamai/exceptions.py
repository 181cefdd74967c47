"""Exception hierarchy.

Every input-validation failure derives from :class:`TeamAIError`, which is a
``ValueError`` so callers that only care about "bad input" can catch that.
"""


class TeamAIError(ValueError):
    pass


class BadLength(TeamAIError):
    pass


class NonMonotone(TeamAIError):
    pass


class NonComplementary(TeamAIError):
    pass


class BadCost(TeamAIError):
    pass


class BadAlpha(TeamAIError):
    pass


class OutOfRange(TeamAIError):
    pass


class CapacityExceeded(TeamAIError):
    pass


class BadCapacity(TeamAIError):
    pass


class FullyReplaced(TeamAIError):
    """A quantity is undefined because the worker is replaced with certainty."""


class Degenerate(TeamAIError):
    """Off-path belief undefined: worker i and i-1 cannot both be human."""


class Boundary(TeamAIError):
    """Gradient requested at a point where some wage is undefined."""


class WrongSize(TeamAIError):
    pass


class InconsistentWages(TeamAIError):
    pass


class BadRange(TeamAIError):
    pass


class ConfigError(TeamAIError):
    def __init__(self, message, field=None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class UnknownSuite(TeamAIError):
    pass
