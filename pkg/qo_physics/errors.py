"""
Exception types shared by every stage package.

All of them derive from ValueError or RuntimeError so callers that only
care about "bad input" vs "refused to run" can catch the builtin type.
"""


class ConfigurationError(ValueError):
    """Invalid configuration value (optics, emission, detector, run)."""


class OutOfRangeError(ConfigurationError):
    """A probability lies outside the range a formula is defined on."""


class UndefinedStatisticError(ValueError):
    """A statistic is undefined for the given counts (e.g. zero singles)."""


class InsufficientDataError(ValueError):
    """Not enough samples or counts to compute a statistic."""


class FitDegenerateError(ValueError):
    """The fringe fit cannot be performed on the given points."""


class GeometryInconsistencyError(ValueError):
    """Flight time and path length disagree beyond tolerance."""


class DelayedChoiceViolationError(RuntimeError):
    """The choice event is not space-like separated from photon entry."""


class LogParseError(ValueError):
    """Malformed event-log content."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class ScenarioError(ValueError):
    """Invalid scenario file. The message names the offending key path."""
