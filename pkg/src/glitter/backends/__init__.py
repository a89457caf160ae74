"""Pluggable probability sources: local n-gram models, precomputed dumps
and remote completions endpoints, all behind one scoring interface."""

from .base import (
    Backend,
    BackendCapabilities,
    Candidate,
    ScoreResult,
    Token,
)
from .http import HttpLogprobBackend
from .model_io import deserialize_model, load_model, save_model, serialize_model
from .ngram import (
    BOS_ID,
    EOS_ID,
    UNK_ID,
    NgramBackend,
    NgramModel,
    split_pieces,
    train_ngram,
)
from .precomputed import DumpRecord, PrecomputedBackend, read_dump, serialize_dump, write_dump

__all__ = [
    "Backend",
    "BackendCapabilities",
    "Candidate",
    "ScoreResult",
    "Token",
    "HttpLogprobBackend",
    "deserialize_model",
    "load_model",
    "save_model",
    "serialize_model",
    "BOS_ID",
    "EOS_ID",
    "UNK_ID",
    "NgramBackend",
    "NgramModel",
    "split_pieces",
    "train_ngram",
    "DumpRecord",
    "PrecomputedBackend",
    "read_dump",
    "serialize_dump",
    "write_dump",
]
