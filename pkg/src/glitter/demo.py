"""Bundled demonstration material.

A small administrative-register corpus in which one boilerplate clause
recurs verbatim, a sample letter containing that clause once, and helpers
to train and cache the corresponding model. Annotating the sample with the
demo model shows the intended effect: the clause cools down to the
most-predictable buckets and gets flagged as a formulaic run, while the
letter's free text stays warm.
"""

from __future__ import annotations

import functools
from importlib import resources
from pathlib import Path

from .backends import NgramBackend, NgramModel, save_model, train_ngram

BOILERPLATE_CLAUSE = (
    "must submit all required documentation within the prescribed time limits"
)

DEMO_ORDER = 3


def _read_data(name: str) -> str:
    return resources.files("glitter.data").joinpath(name).read_text("utf-8")


def corpus_text() -> str:
    return _read_data("formulaic_corpus.txt")


def sample_text() -> str:
    return _read_data("sample_admin.txt")


@functools.lru_cache(maxsize=1)
def demo_model() -> NgramModel:
    return train_ngram(corpus_text(), order=DEMO_ORDER)


def demo_backend(mode: str = "kn") -> NgramBackend:
    return NgramBackend(demo_model(), mode=mode, backend_id="demo")


def save_demo_model(path: str | Path) -> Path:
    """Write the demo model to disk, ready for ``--model`` or a service
    backend entry."""
    path = Path(path)
    save_model(demo_model(), path)
    return path
