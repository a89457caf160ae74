from __future__ import annotations

import pytest

from glitter.backends import NgramBackend, train_ngram


@pytest.fixture(scope="session")
def tiny_model():
    # "a b a b a": small enough to verify every count and probability by hand
    return train_ngram("a b a b a", order=2)


@pytest.fixture(scope="session")
def tiny_backend(tiny_model):
    return NgramBackend(tiny_model)


@pytest.fixture(scope="session")
def prose_model():
    corpus = (
        "the cat sat on the mat . the dog sat on the rug . "
        "the cat saw the dog . the dog saw the cat . "
        "a bird sat on the mat . the cat sat on the rug . "
    ) * 4
    return train_ngram(corpus, order=3)


@pytest.fixture(scope="session")
def prose_backend(prose_model):
    return NgramBackend(prose_model)
