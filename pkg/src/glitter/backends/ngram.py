"""Count-based n-gram language model with interpolated Kneser-Ney smoothing.

Training collects raw n-gram counts for every order 1..N over a token
stream padded with begin-of-sequence markers and closed by an end marker.
Scoring builds the full next-token distribution as a dense vector, either
smoothed (Kneser-Ney, a single absolute discount, lower orders estimated
from continuation counts) or as the raw maximum-likelihood ratio.

The smoothed distribution is exactly normalized and strictly positive for
every predictable token: the interpolation recursion bottoms out in a
uniform distribution over the vocabulary (begin-of-sequence excluded,
since nothing ever predicts it).
"""

from __future__ import annotations

import functools
import hashlib
import math
import unicodedata
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..errors import DomainError, TrainingError, VocabularyError
from .base import Backend, BackendCapabilities, Candidate, ScoreResult, Token

BOS_ID = 0
EOS_ID = 1
UNK_ID = 2

BOS_PIECE = "<s>"
EOS_PIECE = "</s>"
UNK_PIECE = "<unk>"

RESERVED_PIECES = (BOS_PIECE, EOS_PIECE, UNK_PIECE)

DEFAULT_ORDER = 3
DEFAULT_DISCOUNT = 0.75
DEFAULT_UNK_THRESHOLD = 1

# context ids -> next id -> count, one table per order
CountTable = Mapping[tuple[int, ...], Mapping[int, int]]


def _is_punct_char(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def split_pieces(text: str) -> list[str]:
    """Split text into token pieces that concatenate back to it exactly.

    Each piece carries its leading whitespace; punctuation characters are
    single-character pieces; trailing whitespace is appended to the final
    piece. The model identity of a piece is its stripped content, so
    counting is insensitive to the surrounding whitespace.
    """
    pieces: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        start = i
        while i < n and text[i].isspace():
            i += 1
        if i == n:
            if pieces:
                pieces[-1] += text[start:]
            else:
                pieces.append(text[start:])
            break
        if _is_punct_char(text[i]):
            pieces.append(text[start : i + 1])
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and not _is_punct_char(text[j]):
                j += 1
            pieces.append(text[start:j])
            i = j
    return pieces


@dataclass(frozen=True)
class NgramModel:
    """Raw material of a trained model: vocabulary and count tables.

    ``vocab[i]`` is the piece string of token id i; ids 0..2 are reserved
    for the begin, end and unknown markers. A corpus type that collides
    with a reserved piece string keeps its own id and wins the piece
    lookup, so the reserved ids stay structural. ``counts[k-1]`` holds the
    order-k table; every event position of the training stream contributes
    one k-gram to every order, so no table ever predicts the begin marker.
    """

    order: int
    discount: float
    vocab: tuple[str, ...]
    counts: tuple[CountTable, ...]

    def __post_init__(self) -> None:
        if self.order < 1:
            raise DomainError(f"order must be >= 1, got {self.order!r}")
        if not 0.0 < self.discount < 1.0:
            raise DomainError(f"discount must be in (0, 1), got {self.discount!r}")
        if len(self.counts) != self.order:
            raise DomainError("need one count table per order 1..N")
        if len(self.vocab) < len(RESERVED_PIECES) or self.vocab[:3] != RESERVED_PIECES:
            raise VocabularyError("vocabulary must start with the three reserved pieces")

    @functools.cached_property
    def piece_to_id(self) -> dict[str, int]:
        return {piece: i for i, piece in enumerate(self.vocab)}

    def lookup(self, content: str) -> int:
        return self.piece_to_id.get(content, UNK_ID)


def train_ngram(
    text: str,
    order: int = DEFAULT_ORDER,
    discount: float = DEFAULT_DISCOUNT,
    unk_threshold: int = DEFAULT_UNK_THRESHOLD,
) -> NgramModel:
    """Count n-grams of every order 1..``order`` over the tokenized corpus.

    Types occurring at most ``unk_threshold`` times are collapsed into the
    unknown token, which gives the model a nonzero unknown rate without any
    extra machinery.
    """
    if order < 1:
        raise DomainError(f"order must be >= 1, got {order!r}")
    if not 0.0 < discount < 1.0:
        raise DomainError(f"discount must be in (0, 1), got {discount!r}")
    if unk_threshold < 0:
        raise DomainError(f"unk threshold must be >= 0, got {unk_threshold!r}")
    contents = [p.strip() for p in split_pieces(text)]
    if not contents:
        raise TrainingError("training corpus contains no tokens")
    freq = Counter(contents)
    kept = sorted(t for t, c in freq.items() if t and c > unk_threshold)
    vocab = RESERVED_PIECES + tuple(kept)
    lookup = {piece: i for i, piece in enumerate(vocab)}
    ids = [lookup.get(c, UNK_ID) for c in contents]
    stream = [BOS_ID] * (order - 1) + ids + [EOS_ID]
    tables: list[dict[tuple[int, ...], Counter[int]]] = [dict() for _ in range(order)]
    first_event = order - 1
    for pos in range(first_event, len(stream)):
        nxt = stream[pos]
        for k in range(1, order + 1):
            ctx = tuple(stream[pos - k + 1 : pos])
            table = tables[k - 1]
            bucket = table.get(ctx)
            if bucket is None:
                bucket = table[ctx] = Counter()
            bucket[nxt] += 1
    return NgramModel(order=order, discount=discount, vocab=vocab, counts=tuple(tables))


def _continuation_tables(model: NgramModel) -> list[dict[tuple[int, ...], dict[int, int]]]:
    """Continuation counts for orders 1..N-1, derived from the raw counts
    one order above: the count of (ctx, w) is the number of distinct
    left extensions u with a nonzero raw count for (u, ctx, w)."""
    cont: list[dict[tuple[int, ...], dict[int, int]]] = []
    for k in range(1, model.order):
        table: dict[tuple[int, ...], dict[int, int]] = {}
        for upper_ctx, nexts in model.counts[k].items():
            lower_ctx = upper_ctx[1:]
            bucket = table.setdefault(lower_ctx, {})
            for w in nexts:
                bucket[w] = bucket.get(w, 0) + 1
        cont.append(table)
    return cont


@dataclass(frozen=True)
class _Level:
    """One interpolation level, flattened to arrays for dense scoring."""

    contexts: dict[tuple[int, ...], tuple[np.ndarray, np.ndarray, float, int]]

    @classmethod
    def from_table(cls, table: CountTable) -> "_Level":
        contexts = {}
        for ctx, nexts in table.items():
            ids = np.fromiter(nexts.keys(), dtype=np.int64, count=len(nexts))
            counts = np.fromiter(nexts.values(), dtype=np.float64, count=len(nexts))
            contexts[ctx] = (ids, counts, float(counts.sum()), len(nexts))
        return cls(contexts)


class NgramBackend(Backend):
    """Scores text with a trained n-gram model.

    ``mode`` selects the distribution: "kn" for Kneser-Ney smoothing or
    "mle" for raw count ratios (zero for unseen events, uniform when the
    context itself was never observed). ``max_context_tokens`` artificially
    bounds the context window, which is only useful for exercising the
    windowed scoring path; the model itself has no such limit.
    """

    def __init__(
        self,
        model: NgramModel,
        mode: str = "kn",
        backend_id: str = "ngram",
        max_context_tokens: int | None = None,
    ) -> None:
        if mode not in ("kn", "mle"):
            raise DomainError(f"mode must be 'kn' or 'mle', got {mode!r}")
        self.model = model
        self.mode = mode
        self.backend_id = backend_id
        self.model_id = _model_digest(model)
        self.description = f"{model.order}-gram {'Kneser-Ney' if mode == 'kn' else 'MLE'} model, {len(model.vocab)} types"
        self._max_context = max_context_tokens
        self._raw_levels = [_Level.from_table(t) for t in model.counts]
        self._cont_levels = [_Level.from_table(t) for t in _continuation_tables(model)]
        v = len(model.vocab)
        uniform = np.full(v, 1.0 / (v - 1))
        uniform[BOS_ID] = 0.0
        self._uniform = uniform
        self._pred_ids = np.array([i for i in range(v) if i != BOS_ID], dtype=np.int64)

    def capabilities(self) -> BackendCapabilities:
        return BackendCapabilities(
            max_context_tokens=self._max_context,
            provides_full_distribution=True,
            top_k_limit=None,
            has_bos=True,
        )

    def tokenize(self, text: str) -> list[Token]:
        return [Token(self.model.lookup(p.strip()), p) for p in split_pieces(text)]

    def dense_distribution(
        self, context_ids: Sequence[int], from_start: bool = True
    ) -> np.ndarray:
        """Full next-token distribution given a context, as a vector over
        the vocabulary. ``from_start`` marks the context as the entire
        document prefix, in which case short contexts are padded with the
        begin marker; otherwise a short context simply enters the backoff
        recursion at a lower order."""
        n = self.model.order
        ctx = list(context_ids)[-(n - 1) :] if n > 1 else []
        if from_start and len(ctx) < n - 1:
            ctx = [BOS_ID] * (n - 1 - len(ctx)) + ctx
        if self.mode == "mle":
            return self._mle_vector(tuple(ctx))
        return self._kn_vector(tuple(ctx))

    def _mle_vector(self, ctx: tuple[int, ...]) -> np.ndarray:
        level = self._raw_levels[len(ctx)]
        entry = level.contexts.get(ctx)
        if entry is None:
            return self._uniform.copy()
        ids, counts, total, _ = entry
        p = np.zeros(len(self.model.vocab))
        p[ids] = counts / total
        return p

    def _kn_vector(self, ctx: tuple[int, ...]) -> np.ndarray:
        d = self.model.discount
        n = self.model.order
        p = self._uniform.copy()
        for k in range(1, len(ctx) + 2):
            level = self._raw_levels[n - 1] if k == n else self._cont_levels[k - 1]
            entry = level.contexts.get(ctx[len(ctx) - k + 1 :])
            if entry is None:
                continue  # unseen context: keep the lower-order estimate
            ids, counts, total, distinct = entry
            gamma = d * distinct / total
            p *= gamma
            p[ids] += (counts - d) / total
        return p

    def _result(self, p: np.ndarray, actual_id: int, top_k: int) -> ScoreResult:
        pa = float(p[actual_id])
        pred = self._pred_ids
        pp = p[pred]
        higher = int(np.count_nonzero(pp > pa))
        ties_before = int(np.count_nonzero((pp == pa) & (pred < actual_id)))
        rank = 1 + higher + ties_before
        candidates: tuple[Candidate, ...] = ()
        if top_k > 0:
            take = min(top_k, len(pred))
            order = np.lexsort((pred, -pp))[:take]
            candidates = tuple(
                Candidate(int(pred[i]), self.model.vocab[int(pred[i])], float(pp[i]))
                for i in order
            )
        covered = sum(c.probability for c in candidates)
        return ScoreResult(
            actual_probability=pa,
            actual_rank=rank,
            top_candidates=candidates,
            tail_mass=max(0.0, 1.0 - covered),
        )

    def score(self, context: Sequence[Token], actual: Token, top_k: int) -> ScoreResult:
        if top_k < 0:
            raise DomainError(f"top_k must be >= 0, got {top_k!r}")
        p = self.dense_distribution([t.token_id for t in context], from_start=True)
        return self._result(p, actual.token_id, top_k)

    def score_window(
        self,
        tokens: Sequence[Token],
        window_start: int,
        scored_start: int,
        scored_end: int,
        top_k: int,
    ) -> list[ScoreResult]:
        if top_k < 0:
            raise DomainError(f"top_k must be >= 0, got {top_k!r}")
        ids = [t.token_id for t in tokens]
        results = []
        for i in range(scored_start, scored_end):
            p = self.dense_distribution(ids[window_start:i], from_start=window_start == 0)
            results.append(self._result(p, ids[i], top_k))
        return results

    def perplexity(self, text: str, base: float = 2.0) -> float:
        """Token-level perplexity of held-out text, end marker included."""
        ids = [t.token_id for t in self.tokenize(text)]
        stream = ids + [EOS_ID]
        total = 0.0
        for i, tid in enumerate(stream):
            p = float(self.dense_distribution(ids[:i], from_start=True)[tid])
            if p <= 0.0:
                return math.inf
            total -= math.log(p, base)
        return base ** (total / len(stream))


def _model_digest(model: NgramModel) -> str:
    # imported here: model_io needs NgramModel at module level
    from .model_io import serialize_model

    return hashlib.sha256(serialize_model(model)).hexdigest()[:12]


def iter_ngrams(table: CountTable) -> Iterable[tuple[tuple[int, ...], int, int]]:
    """Flatten a count table into (context, next id, count) triples in
    lexicographic order, the canonical layout used by the file format."""
    for ctx in sorted(table):
        nexts = table[ctx]
        for nxt in sorted(nexts):
            yield ctx, nxt, nexts[nxt]


def table_from_triples(
    triples: Iterable[tuple[tuple[int, ...], int, int]],
) -> dict[tuple[int, ...], dict[int, int]]:
    table: dict[tuple[int, ...], dict[int, int]] = {}
    for ctx, nxt, count in triples:
        table.setdefault(ctx, {})[nxt] = count
    return table
