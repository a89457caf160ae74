"""Information-theoretic primitives.

Surprisal, entropy, chain-rule aggregation, rank bucketing, formulaic-run
detection and document statistics. Everything in here is a pure function of
its inputs; no shared mutable state, safe under concurrency.

Probabilities and surprisal values are plain floats. Surprisal is measured
in units of the chosen log base (bits for base 2, the default).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError

Probability = float
Surprisal = float

DEFAULT_BASE = 2.0
DEFAULT_SURPRISAL_CAP = 64.0

NUM_BUCKETS = 16

# Upper rank bound (inclusive) of buckets 0..14; bucket 15 is open-ended.
# Single-rank resolution at the head, geometric growth in the tail.
DEFAULT_BUCKET_BOUNDS = (1, 2, 3, 4, 6, 8, 12, 16, 32, 64, 128, 256, 512, 1024, 4096)

PROB_SUM_TOLERANCE = 1e-6


class Marker(enum.Enum):
    """Non-numeric rank states.

    UNKNOWN: the position was scored but the backend could not report a rank
    (truncated top-k sources). UNSCORED: the position has no probability at
    all (e.g. the first token of a document under a backend without a
    begin-of-sequence symbol).
    """

    UNKNOWN = "unknown"
    UNSCORED = "unscored"


UNKNOWN = Marker.UNKNOWN
UNSCORED = Marker.UNSCORED


def _log(x: float, base: float) -> float:
    # math.log2 is correctly rounded; the two-argument form is not.
    if base == 2.0:
        return math.log2(x)
    if base == math.e:
        return math.log(x)
    return math.log(x) / math.log(base)


def _check_base(base: float) -> None:
    if not base > 1.0:
        raise DomainError(f"log base must be > 1, got {base!r}")


def surprisal(p: Probability, base: float = DEFAULT_BASE, cap: float | None = None) -> Surprisal:
    """Information content -log_base(p) of an event with probability p.

    Strictly decreasing in p; zero iff p == 1. A zero probability (possible
    with truncated external backends) is only accepted when ``cap`` is
    given, in which case the result is ``cap`` instead of infinity; callers
    that need to distinguish a capped value can test ``p == 0`` themselves.
    """
    _check_base(base)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"probability {p!r} outside [0, 1]")
    if p == 0.0:
        if cap is None:
            raise DomainError("surprisal of probability 0 is unbounded; pass cap= to clamp it")
        return cap
    return -_log(p, base)


@dataclass(frozen=True)
class TokenDistribution:
    """A next-token probability distribution, complete or top-k truncated.

    ``entries`` are (token_id, probability) pairs sorted by descending
    probability, ties broken by ascending token id. ``tail_mass`` is the
    probability mass not covered by ``entries`` (zero when ``complete``).
    """

    entries: tuple[tuple[int, float], ...]
    complete: bool
    tail_mass: float = 0.0

    def validate(self) -> None:
        if self.tail_mass < 0.0:
            raise DomainError(f"tail_mass must be >= 0, got {self.tail_mass!r}")
        if self.complete and self.tail_mass != 0.0:
            raise DomainError("a complete distribution cannot carry tail mass")
        total = math.fsum(p for _, p in self.entries) + self.tail_mass
        if abs(total - 1.0) > PROB_SUM_TOLERANCE:
            raise DomainError(f"distribution sums to {total!r}, not 1")
        prev: tuple[int, float] | None = None
        for tid, p in self.entries:
            if not 0.0 <= p <= 1.0:
                raise DomainError(f"entry probability {p!r} outside [0, 1]")
            if prev is not None:
                prev_id, prev_p = prev
                if p > prev_p or (p == prev_p and tid <= prev_id):
                    raise DomainError(
                        "entries must be sorted by descending probability, ties by ascending token id"
                    )
            prev = (tid, p)


def entropy(dist: TokenDistribution, base: float = DEFAULT_BASE) -> float:
    """Average uncertainty -sum p_i log(p_i) of a distribution.

    0 * log(0) is taken as 0. For a truncated distribution the uncovered
    tail is lumped into a single -tail * log(tail) term, which makes the
    result a lower-bound estimate of the true entropy (``dist.complete``
    tells the two cases apart); it is never silently exact.
    """
    _check_base(base)
    dist.validate()
    h = -math.fsum(p * _log(p, base) for _, p in dist.entries if p > 0.0)
    if not dist.complete and dist.tail_mass > 0.0:
        h -= dist.tail_mass * _log(dist.tail_mass, base)
    return h


def chain_rule_probability(subword_probs: Sequence[Probability]) -> Probability:
    """Joint probability of a multi-token word: the product of its subword
    conditional probabilities. Equivalently, the word surprisal is the sum
    of the subword surprisals."""
    if len(subword_probs) == 0:
        raise DomainError("chain rule over an empty list is undefined")
    for p in subword_probs:
        if not 0.0 < p <= 1.0:
            raise DomainError(f"subword probability {p!r} outside (0, 1]")
    return math.prod(subword_probs)


def bucket_of_rank(rank: int | Marker, bounds: Sequence[int] = DEFAULT_BUCKET_BOUNDS) -> int:
    """Map a 1-based rank to one of 16 buckets (0 = most predictable).

    Monotone non-decreasing in rank. The UNSCORED marker maps to the last
    bucket; an UNKNOWN rank has no rank bucket (use bucket_of_probability).
    """
    if rank is UNSCORED:
        return NUM_BUCKETS - 1
    if isinstance(rank, Marker):
        raise DomainError("rank UNKNOWN has no rank-based bucket; use bucket_of_probability")
    if rank < 1:
        raise DomainError(f"rank must be >= 1, got {rank!r}")
    for bucket, bound in enumerate(bounds):
        if rank <= bound:
            return bucket
    return len(bounds)


def bucket_of_probability(p: Probability) -> int:
    """Fallback bucket when the true rank is unknowable (truncated backends).

    Bucket b covers probabilities in (2^-(b+1), 2^-b] for b < 15; everything
    at or below 2^-15 (including 0) lands in bucket 15.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"probability {p!r} outside [0, 1]")
    for b in range(NUM_BUCKETS - 1):
        if p > 2.0 ** -(b + 1):
            return b
    return NUM_BUCKETS - 1


def validate_bucket_bounds(bounds: Sequence[int]) -> None:
    """A bounds override must keep exactly 16 buckets and stay monotone."""
    if len(bounds) != NUM_BUCKETS - 1:
        raise DomainError(f"need {NUM_BUCKETS - 1} finite bucket bounds, got {len(bounds)}")
    if bounds[0] < 1 or any(b >= a for b, a in zip(bounds, bounds[1:])):
        raise DomainError("bucket bounds must be strictly increasing and start at >= 1")


@dataclass(frozen=True)
class FormulaicRun:
    """A maximal stretch of consecutive low-surprisal words (boilerplate)."""

    start_word: int
    end_word: int  # inclusive
    mean_surprisal: Surprisal


def detect_formulaic_runs(
    word_surprisals: Sequence[Surprisal | None],
    threshold: Surprisal,
    min_len: int,
) -> list[FormulaicRun]:
    """All maximal runs of >= min_len consecutive words with surprisal <=
    threshold. Unscored words (None) terminate runs. Runs are disjoint and
    ordered by start index."""
    if min_len < 2:
        raise DomainError(f"min_len must be >= 2, got {min_len!r}")
    if not threshold > 0.0:
        raise DomainError(f"threshold must be > 0, got {threshold!r}")
    runs: list[FormulaicRun] = []
    start: int | None = None
    n = len(word_surprisals)
    for i in range(n + 1):  # one past the end flushes the final run
        s = word_surprisals[i] if i < n else None
        if s is not None and s <= threshold:
            if start is None:
                start = i
        elif start is not None:
            if i - start >= min_len:
                window = [word_surprisals[j] for j in range(start, i)]
                runs.append(FormulaicRun(start, i - 1, sum(window) / len(window)))
            start = None
    return runs


@dataclass(frozen=True)
class DocumentStats:
    """Aggregate view of an annotated document.

    ``mean_surprisal`` and ``perplexity`` are None when no word could be
    scored. The histogram counts buckets of scored words only, so it sums
    to ``scored_words``.
    """

    token_count: int
    word_count: int
    scored_words: int
    mean_surprisal: Surprisal | None
    perplexity: float | None
    bucket_histogram: tuple[int, ...]
    formulaic_coverage: float


def document_stats(
    word_surprisals: Sequence[Surprisal | None],
    word_buckets: Sequence[int],
    runs: Sequence[FormulaicRun],
    base: float = DEFAULT_BASE,
    token_count: int = 0,
) -> DocumentStats:
    """Aggregate per-word annotations into document statistics.

    mean_surprisal is the arithmetic mean over scored words; perplexity is
    base ** mean_surprisal; formulaic_coverage is the fraction of scored
    words lying inside a detected run.
    """
    _check_base(base)
    if len(word_surprisals) != len(word_buckets):
        raise DomainError("word_surprisals and word_buckets must have equal length")
    histogram = [0] * NUM_BUCKETS
    scored = 0
    total = 0.0
    for s, b in zip(word_surprisals, word_buckets):
        if s is None:
            continue
        scored += 1
        total += s
        histogram[b] += 1
    if scored == 0:
        return DocumentStats(
            token_count=token_count,
            word_count=len(word_surprisals),
            scored_words=0,
            mean_surprisal=None,
            perplexity=None,
            bucket_histogram=tuple(histogram),
            formulaic_coverage=0.0,
        )
    mean = total / scored
    in_runs = sum(r.end_word - r.start_word + 1 for r in runs)
    return DocumentStats(
        token_count=token_count,
        word_count=len(word_surprisals),
        scored_words=scored,
        mean_surprisal=mean,
        perplexity=base ** mean,
        bucket_histogram=tuple(histogram),
        formulaic_coverage=in_runs / scored,
    )
