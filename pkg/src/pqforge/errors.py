"""Exception hierarchy shared by every pqforge module."""

from __future__ import annotations

from typing import Any


class PqforgeError(Exception):
    """Base class for all errors raised by pqforge."""


class ValidationError(PqforgeError, ValueError):
    """An input object violates its structural invariants."""


class DomainError(PqforgeError, ValueError):
    """An argument lies outside the domain of the requested formula."""


class CapabilityError(PqforgeError):
    """The request exceeds what an oracle is built to handle (size limits)."""


class RangeError(PqforgeError, OverflowError):
    """A search left the representable/allowed integer range."""


class ConvergenceError(PqforgeError, RuntimeError):
    """A fixed-point iteration did not settle."""


class NonTerminationError(PqforgeError, RuntimeError):
    """An optimizer hit its iteration cap.

    ``state`` carries the loop variables at the moment the cap was reached so
    callers can dump a diagnostic.
    """

    def __init__(self, message: str, state: dict[str, Any] | None = None):
        super().__init__(message)
        self.state = dict(state or {})


class ConfigError(PqforgeError, ValueError):
    """A configuration file or override could not be parsed."""
