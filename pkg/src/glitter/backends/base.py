"""Backend protocol: what a language-model source must provide.

A backend turns text into tokens and assigns next-token probabilities. The
pipeline only ever talks to this interface, so n-gram models, precomputed
dumps and remote HTTP services are interchangeable.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass, field
from typing import Sequence

from ..core import Marker
from ..errors import CapabilityError


@dataclass(frozen=True)
class BackendCapabilities:
    """What a backend can and cannot do.

    ``max_context_tokens`` is None for unbounded context. When
    ``provides_full_distribution`` is true the backend can enumerate the
    entire next-token distribution and ``top_k_limit`` must be None;
    otherwise ``top_k_limit`` caps how many candidates a score request may
    ask for.
    """

    max_context_tokens: int | None
    provides_full_distribution: bool
    top_k_limit: int | None
    has_bos: bool

    def __post_init__(self) -> None:
        if self.provides_full_distribution and self.top_k_limit is not None:
            raise CapabilityError("a full-distribution backend cannot have a top-k limit")
        if self.max_context_tokens is not None and self.max_context_tokens < 2:
            raise CapabilityError("a bounded context of fewer than 2 tokens cannot score anything")


@dataclass(frozen=True)
class Token:
    token_id: int
    piece: str


@dataclass(frozen=True)
class Candidate:
    """One entry of a top-k candidate list. ``token_id`` may be None for
    sources that only report piece strings."""

    token_id: int | None
    piece: str
    probability: float


@dataclass(frozen=True)
class ScoreResult:
    """Outcome of scoring one position.

    ``actual_rank`` is the 1-based rank of the actual token in the full
    distribution, or Marker.UNKNOWN when the backend cannot determine it.
    ``top_candidates`` are sorted by descending probability. ``tail_mass``
    is the probability mass outside ``top_candidates`` (for entropy
    estimates over truncated sources).
    """

    actual_probability: float
    actual_rank: int | Marker
    top_candidates: tuple[Candidate, ...] = field(default_factory=tuple)
    tail_mass: float = 0.0


class Backend(abc.ABC):
    """A pluggable probability source."""

    backend_id: str
    model_id: str
    description: str

    @abc.abstractmethod
    def capabilities(self) -> BackendCapabilities: ...

    @abc.abstractmethod
    def tokenize(self, text: str) -> list[Token]:
        """Split text into tokens whose pieces concatenate back to it."""

    @abc.abstractmethod
    def score(self, context: Sequence[Token], actual: Token, top_k: int) -> ScoreResult:
        """Probability of ``actual`` following ``context``.

        An empty context means document start; backends with a
        begin-of-sequence convention condition on it implicitly.
        """

    def score_window(
        self,
        tokens: Sequence[Token],
        window_start: int,
        scored_start: int,
        scored_end: int,
        top_k: int,
    ) -> list[ScoreResult]:
        """Score tokens[scored_start:scored_end] given context back to
        ``window_start``. The default loops over ``score``; backends with a
        cheaper batch path (one HTTP call per window) override this.
        """
        results: list[ScoreResult] = []
        for i in range(scored_start, scored_end):
            results.append(self.score(tokens[window_start:i], tokens[i], top_k))
        return results
