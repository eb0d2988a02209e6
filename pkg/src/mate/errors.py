"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class MateError(Exception):
    """Base class for all toolkit errors."""


class FormatError(MateError):
    """A file or payload does not parse as the expected format."""


class ValidationError(MateError):
    """Parsed data violates a documented invariant."""


class NotFoundError(MateError):
    """A referenced entity (guideline entry, case, session) does not exist."""


class StateError(MateError):
    """An operation was attempted in a state that forbids it."""


class ConflictError(MateError):
    """A mutation lost a write race or repeats a one-shot action."""


class ParseError(MateError):
    """Model output could not be parsed into the expected structure.

    Carries the raw text so failures can be diagnosed or regenerated.
    """

    def __init__(self, message: str, raw: str = ""):
        super().__init__(message)
        self.raw = raw


class BackendError(MateError):
    """A chat backend call failed.

    ``retryable`` distinguishes transient transport faults from hard
    failures (script exhausted, retries exhausted).
    """

    def __init__(self, message: str, retryable: bool = False):
        super().__init__(message)
        self.retryable = retryable
