"""The annotation pipeline: text in, annotated document out.

Normalizes the input, tokenizes it with the chosen backend, verifies the
tokens tile the text, scores every scorable position (windowed when the
backend's context is bounded), then aggregates tokens into words, words
into formulaic runs and the whole thing into document statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .backends.base import Backend, Candidate, Token
from .backends.precomputed import DumpRecord
from .config import GlitterConfig
from .core import (
    NUM_BUCKETS,
    DocumentStats,
    FormulaicRun,
    Marker,
    bucket_of_probability,
    bucket_of_rank,
    chain_rule_probability,
    detect_formulaic_runs,
    document_stats,
    surprisal,
)
from .errors import (
    BackendError,
    BudgetExceededError,
    CapabilityError,
    EmptyTextError,
    PartialAnnotationError,
    ProtocolError,
)
from .segmentation import WordGroup, align_tokens, group_words, normalize


@dataclass(frozen=True)
class PositionFlags:
    capped: bool = False
    estimated_rank: bool = False
    unscored: bool = False


@dataclass(frozen=True)
class PositionAnnotation:
    """Everything known about one token position."""

    token_index: int
    piece: str
    span: tuple[int, int]
    probability: float | None
    surprisal: float | None
    rank: int | Marker
    bucket: int
    top_candidates: tuple[Candidate, ...] = ()
    flags: PositionFlags = field(default_factory=PositionFlags)


@dataclass(frozen=True)
class WordAnnotation:
    """A word's aggregate: joint probability of its tokens (chain rule),
    summed surprisal, and the bucket of its least predictable token."""

    group: WordGroup
    probability: float | None
    surprisal: float | None
    bucket: int
    capped: bool = False


@dataclass(frozen=True)
class Provenance:
    backend_id: str
    model_id: str
    config_digest: str


@dataclass(frozen=True)
class AnnotatedDocument:
    normalized_text: str
    base: float
    positions: tuple[PositionAnnotation, ...]
    words: tuple[WordAnnotation, ...]
    runs: tuple[FormulaicRun, ...]
    stats: DocumentStats
    provenance: Provenance


@dataclass(frozen=True)
class Window:
    """One scoring call: context reaches back to ``start``, probabilities
    are recorded for [scored_start, scored_end)."""

    start: int
    scored_start: int
    scored_end: int


def window_plan(
    token_count: int,
    max_context_tokens: int | None,
    stride_fraction: float,
    min_context: int = 0,
) -> list[Window]:
    """Split a document into overlapping windows for a bounded backend.

    The scored ranges partition [0, token_count). The stride is the window
    fraction by which each step advances; the remainder is kept as context
    for the next window's scored positions. ``min_context`` forces at least
    that much context before every scored range after the first, which
    sources without a begin-of-sequence convention need.
    """
    if token_count <= 0:
        return []
    w = max_context_tokens
    if w is None or token_count <= w:
        return [Window(0, 0, token_count)]
    stride = max(1, math.floor(w * stride_fraction))
    if min_context > 0:
        stride = min(stride, w - min_context)
    windows = [Window(0, 0, w)]
    scored_end = w
    while scored_end < token_count:
        start = min(scored_end - (w - stride), token_count - w)
        end = start + w
        windows.append(Window(start, scored_end, end))
        scored_end = end
    return windows


def _annotate_position(
    index: int,
    token: Token,
    span: tuple[int, int],
    probability: float,
    rank: int | Marker,
    candidates: tuple[Candidate, ...],
    config: GlitterConfig,
) -> PositionAnnotation:
    raw = surprisal(probability, config.base, cap=config.surprisal_cap)
    capped = probability == 0.0 or raw > config.surprisal_cap
    s = min(raw, config.surprisal_cap)
    if isinstance(rank, Marker):
        bucket = bucket_of_probability(probability)
        estimated = True
    else:
        bucket = bucket_of_rank(rank, config.bucket_bounds)
        estimated = False
    return PositionAnnotation(
        token_index=index,
        piece=token.piece,
        span=span,
        probability=probability,
        surprisal=s,
        rank=rank,
        bucket=bucket,
        top_candidates=candidates,
        flags=PositionFlags(capped=capped, estimated_rank=estimated),
    )


def _unscored_position(index: int, token: Token, span: tuple[int, int]) -> PositionAnnotation:
    return PositionAnnotation(
        token_index=index,
        piece=token.piece,
        span=span,
        probability=None,
        surprisal=None,
        rank=Marker.UNSCORED,
        bucket=NUM_BUCKETS - 1,
        top_candidates=(),
        flags=PositionFlags(unscored=True),
    )


def _aggregate_word(
    group: WordGroup, positions: Sequence[PositionAnnotation]
) -> WordAnnotation:
    members = positions[group.token_start : group.token_end]
    if any(m.probability is None for m in members):
        return WordAnnotation(group, None, None, NUM_BUCKETS - 1, capped=False)
    probs = [m.probability for m in members]
    joint = chain_rule_probability(probs) if all(p > 0.0 for p in probs) else 0.0
    return WordAnnotation(
        group=group,
        probability=joint,
        surprisal=sum(m.surprisal for m in members),
        bucket=max(m.bucket for m in members),
        capped=any(m.flags.capped for m in members),
    )


def glitter(
    text: str,
    backend: Backend,
    config: GlitterConfig | None = None,
    token_budget: int | None = None,
) -> AnnotatedDocument:
    """Annotate a document with per-token and per-word surprisal.

    Raises EmptyTextError for empty input, AlignmentError when the backend's
    tokens do not tile the normalized text, BudgetExceededError when the
    document tokenizes to more than ``token_budget`` positions, and
    PartialAnnotationError when scoring fails midway (the error carries
    everything annotated so far).
    """
    config = config or GlitterConfig()
    config.validate()
    if not text:
        raise EmptyTextError("there is nothing to annotate in empty text")
    norm = normalize(text)
    tokens = backend.tokenize(norm.text)
    if token_budget is not None and len(tokens) > token_budget:
        raise BudgetExceededError(
            f"document has {len(tokens)} tokens, budget is {token_budget}",
            token_count=len(tokens),
            budget=token_budget,
        )
    spans = align_tokens(norm.text, [t.piece for t in tokens])
    caps = backend.capabilities()

    top_k = min(config.top_k, 5)
    if caps.top_k_limit is not None:
        top_k = min(top_k, caps.top_k_limit)
    skip = 0 if caps.has_bos else 1
    plan = window_plan(
        len(tokens),
        caps.max_context_tokens,
        config.stride_fraction,
        min_context=0 if caps.has_bos else 1,
    )

    positions: list[PositionAnnotation] = []
    for window in plan:
        scored_from = max(window.scored_start, skip)
        for i in range(window.scored_start, scored_from):
            positions.append(_unscored_position(i, tokens[i], (spans[i].start, spans[i].end)))
        if scored_from >= window.scored_end:
            continue
        try:
            results = backend.score_window(
                tokens, window.start, scored_from, window.scored_end, top_k
            )
        except (BackendError, ProtocolError, CapabilityError) as exc:
            raise PartialAnnotationError(
                f"scoring failed at token {len(positions)}: {exc}",
                completed_positions=positions,
                failing_index=len(positions),
                cause=exc,
            ) from exc
        if len(results) != window.scored_end - scored_from:
            raise PartialAnnotationError(
                f"backend returned {len(results)} results for "
                f"{window.scored_end - scored_from} positions",
                completed_positions=positions,
                failing_index=len(positions),
                cause=None,
            )
        for offset, result in enumerate(results):
            i = scored_from + offset
            positions.append(
                _annotate_position(
                    i,
                    tokens[i],
                    (spans[i].start, spans[i].end),
                    result.actual_probability,
                    result.actual_rank,
                    tuple(result.top_candidates[:top_k]),
                    config,
                )
            )

    groups = group_words(spans)
    words = tuple(_aggregate_word(g, positions) for g in groups)
    runs = tuple(
        detect_formulaic_runs(
            [w.surprisal for w in words], config.formulaic_threshold, config.formulaic_min_len
        )
    )
    stats = document_stats(
        [w.surprisal for w in words],
        [w.bucket for w in words],
        runs,
        base=config.base,
        token_count=len(tokens),
    )
    return AnnotatedDocument(
        normalized_text=norm.text,
        base=config.base,
        positions=tuple(positions),
        words=words,
        runs=runs,
        stats=stats,
        provenance=Provenance(backend.backend_id, backend.model_id, config.digest()),
    )


def dump_records(document: AnnotatedDocument) -> list[DumpRecord]:
    """Convert an annotated document into replayable dump records.

    Logprobs are stored as natural logs. A zero probability (a capped
    position) has no finite logprob and dumps as unscored; candidates with
    zero probability are dropped for the same reason.
    """
    records = []
    for pos in document.positions:
        scored = pos.probability is not None and pos.probability > 0.0
        records.append(
            DumpRecord(
                index=pos.token_index,
                piece=pos.piece,
                logprob=math.log(pos.probability) if scored else None,
                rank=pos.rank if isinstance(pos.rank, int) else None,
                top=tuple(
                    (c.piece, math.log(c.probability))
                    for c in pos.top_candidates
                    if c.probability > 0.0
                ),
            )
        )
    return records
