"""Exception hierarchy shared by the whole package."""

from __future__ import annotations


class GlitterError(Exception):
    """Base class for every error raised by this package."""


class DomainError(GlitterError, ValueError):
    """A mathematical input is outside its domain (bad probability, rank, ...)."""


class ConfigError(GlitterError, ValueError):
    """Invalid configuration value or file."""


class AlignmentError(GlitterError):
    """Token pieces do not tile the normalized text."""

    def __init__(self, message: str, offset: int):
        super().__init__(message)
        self.offset = offset


class VocabularyError(GlitterError):
    """A token id is unknown to the backend."""


class CapabilityError(GlitterError):
    """A request exceeds what the backend declares it can do."""


class BackendError(GlitterError):
    """Scoring failed inside a backend (transport, model, ...)."""

    retryable = False


class RetryableBackendError(BackendError):
    """Transient backend failure; retrying may succeed."""

    retryable = True


class ProtocolError(BackendError):
    """A remote server answered with a payload we cannot interpret."""

    def __init__(self, message: str, payload_excerpt: str = ""):
        super().__init__(message)
        self.payload_excerpt = payload_excerpt


class ModelFormatError(GlitterError):
    """A model file is corrupt, truncated or has the wrong version."""


class TrainingError(GlitterError):
    """Model training cannot proceed (e.g. empty corpus)."""


class EmptyTextError(GlitterError, ValueError):
    """Input text is empty after normalization."""


class BudgetExceededError(GlitterError):
    """The document needs more tokens than the caller is willing to score."""

    def __init__(self, message: str, token_count: int, budget: int):
        super().__init__(message)
        self.token_count = token_count
        self.budget = budget


class PartialAnnotationError(BackendError):
    """The backend failed mid-document.

    Carries the annotations completed before the failure and the index of
    the first position that could not be scored.
    """

    def __init__(self, message: str, completed_positions, failing_index: int, cause: Exception | None = None):
        super().__init__(message)
        self.completed_positions = completed_positions
        self.failing_index = failing_index
        self.cause = cause
