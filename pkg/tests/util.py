"""Shared test helpers: corpus generators, independent reference
implementations used as oracles, and output scrapers."""

from __future__ import annotations

import random
from collections import Counter
from html.parser import HTMLParser

WORD_POOL = [
    "the", "a", "of", "to", "and", "in", "is", "for", "on", "with",
    "office", "file", "case", "notice", "review", "form", "letter",
    "number", "time", "week", "day", "fee", "record", "decision",
    "apple", "river", "stone", "window", "garden", "paper", "light",
]

PUNCT_POOL = [".", ",", ";", "?"]


def random_corpus(rng: random.Random, max_tokens: int = 1000, pool: list[str] | None = None) -> str:
    """Zipf-flavored random text: early pool words are much more frequent,
    with occasional punctuation."""
    pool = pool or WORD_POOL
    n = rng.randint(20, max_tokens)
    weights = [1.0 / (i + 1) for i in range(len(pool))]
    out = []
    for _ in range(n):
        if out and rng.random() < 0.1:
            out.append(rng.choice(PUNCT_POOL))
        else:
            out.append(rng.choices(pool, weights)[0])
    return " ".join(out)


def brute_force_runs(surprisals, threshold, min_len):
    """Maximal low-surprisal stretches via a grouping pass, written
    differently from the library's scanner."""
    import itertools

    runs = []
    index = 0
    for is_low, group in itertools.groupby(
        surprisals, key=lambda s: s is not None and s <= threshold
    ):
        block = list(group)
        if is_low and len(block) >= min_len:
            runs.append((index, index + len(block) - 1, sum(block) / len(block)))
        index += len(block)
    return runs


class ReferenceKneserNey:
    """Textbook interpolated Kneser-Ney with one absolute discount,
    computed recursively over plain dicts. Independent of the library's
    dense-vector implementation; used to cross-check its probabilities.

    counts[k] maps (context, next) pairs of order k+1 to raw counts.
    """

    def __init__(self, order, discount, vocab_size, counts):
        self.order = order
        self.d = discount
        self.vocab_size = vocab_size  # includes the 3 reserved ids
        self.raw = []
        for table in counts:
            flat = Counter()
            for ctx, nexts in table.items():
                for w, c in nexts.items():
                    flat[(ctx, w)] = c
            self.raw.append(flat)

    def _continuation(self, k):
        # order-k continuation counts from order-(k+1) raw counts
        cont = Counter()
        for (ctx, w), c in self.raw[k].items():
            if c > 0:
                cont[(ctx[1:], w)] += 1
        return cont

    def prob(self, context, w, enter_order=None):
        context = tuple(context)
        enter = enter_order if enter_order is not None else min(self.order, len(context) + 1)
        return self._p(context[len(context) - enter + 1 :] if enter > 1 else (), w, enter)

    def _p(self, ctx, w, k):
        if k == 0:
            return 0.0 if w == 0 else 1.0 / (self.vocab_size - 1)
        table = self.raw[k - 1] if k == self.order else self._continuation(k)
        total = sum(c for (c2, _), c in table.items() if c2 == ctx)
        if total == 0:
            return self._p(ctx[1:] if ctx else (), w, k - 1)
        count = table.get((ctx, w), 0)
        distinct = sum(1 for (c2, _), c in table.items() if c2 == ctx and c > 0)
        gamma = self.d * distinct / total
        lower = self._p(ctx[1:] if ctx else (), w, k - 1)
        return max(count - self.d, 0.0) / total + gamma * lower


class VisibleText(HTMLParser):
    """Collects the visible text inside the annotated-text container."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.depth = 0
        self.chunks = []

    def handle_starttag(self, tag, attrs):
        if dict(attrs).get("id") == "glitter-text":
            self.depth = 1
        elif self.depth:
            self.depth += 1

    def handle_endtag(self, tag):
        if self.depth:
            self.depth -= 1

    def handle_data(self, data):
        if self.depth:
            self.chunks.append(data)


def visible_html_text(page: str) -> str:
    parser = VisibleText()
    parser.feed(page)
    return "".join(parser.chunks)
