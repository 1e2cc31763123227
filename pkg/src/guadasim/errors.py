"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, any other
GuadasimError (or ValueError from a model) -> 2.
"""

from __future__ import annotations


class GuadasimError(Exception):
    """Base class for model and simulation errors."""


class ConfigError(GuadasimError):
    """A scenario or fixture file failed validation.

    Carries one message per violated field so callers can report all
    problems in a single pass.
    """

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class CapabilityError(GuadasimError):
    """A unit was asked to perform work beyond its capability tier."""


class IllegalTransitionError(GuadasimError):
    """A pod operation was invoked in a state that does not permit it."""


class EventOrderError(GuadasimError):
    """An event arrived with a timestamp earlier than the pod's log head."""
