"""Acceptance checks, one test per shipped guarantee.

Each test prints a single PASS/FAIL line naming its guarantee, so a
verbose run doubles as a release checklist. Tolerances and time bounds
are asserted, never eyeballed, and every randomized check runs on a
fixed seed so a failure is reproducible as-is.
"""

from __future__ import annotations

import json
import math
import random
import shutil
import subprocess
import time

from fastapi.testclient import TestClient

from glitter import (
    GlitterConfig,
    Marker,
    NgramBackend,
    TokenDistribution,
    bucket_of_rank,
    build_registry,
    canonical,
    detect_formulaic_runs,
    entropy,
    glitter,
    load_model,
    load_settings,
    save_model,
    to_ansi,
    to_html,
    to_structured,
    train_ngram,
    window_plan,
)
from glitter.backends import DumpRecord, PrecomputedBackend, serialize_model
from glitter.backends.ngram import BOS_ID
from glitter.demo import BOILERPLATE_CLAUSE, demo_backend, sample_text, save_demo_model
from glitter.render import strip_ansi
from glitter.service import create_app

import util

SEED = 20260814


def report(guarantee: str, failures: list[str]) -> None:
    """One verdict line per guarantee; details go into the assert message."""
    print(f"{'PASS' if not failures else 'FAIL'}  {guarantee}")
    assert not failures, f"{guarantee} :: " + " | ".join(failures[:5])


def test_rank_buckets_total_monotone_surjective():
    bounds = (1, 2, 3, 4, 6, 8, 12, 16, 32, 64, 128, 256, 512, 1024, 4096)

    def by_hand(rank: int) -> int:
        for bucket, bound in enumerate(bounds):
            if rank <= bound:
                return bucket
        return 15

    failures = []
    started = time.monotonic()
    buckets = [bucket_of_rank(r) for r in range(1, 4098)]
    if buckets != [by_hand(r) for r in range(1, 4098)]:
        failures.append("bucket_of_rank disagrees with the hand enumeration")
    if any(b > a for b, a in zip(buckets, buckets[1:])):
        failures.append("bucket of rank is not monotone")
    if set(buckets) != set(range(16)):
        failures.append(f"ranks 1..4097 reach buckets {sorted(set(buckets))}, not all 16")
    if bucket_of_rank(Marker.UNSCORED) != 15:
        failures.append("the unscored marker must land in the last bucket")
    elapsed = time.monotonic() - started
    if elapsed >= 1.0:
        failures.append(f"enumeration took {elapsed:.2f}s, bound is 1s")
    report("16 rank buckets, total/monotone/surjective over ranks 1..4097", failures)


def test_every_scored_position_carries_top_candidates():
    rng = random.Random(SEED)
    failures = []
    backend = NgramBackend(train_ngram(util.random_corpus(rng, 800), order=3))
    scored = 0
    while scored < 1000:
        document = glitter(util.random_corpus(rng, 150), backend, GlitterConfig())
        for pos in document.positions:
            if pos.probability is None:
                continue
            scored += 1
            if len(pos.top_candidates) > 5:
                failures.append(f"{len(pos.top_candidates)} candidates at token {pos.token_index}")
            probs = [c.probability for c in pos.top_candidates]
            if probs != sorted(probs, reverse=True):
                failures.append(f"candidates out of order at token {pos.token_index}")
            if (
                isinstance(pos.rank, int)
                and pos.rank <= len(pos.top_candidates)
                and pos.top_candidates[pos.rank - 1].probability != pos.probability
            ):
                failures.append(f"rank {pos.rank} does not line up with candidate list")
    report("every scored position carries <= 5 candidates, sorted descending", failures)


def test_word_surprisal_is_the_sum_of_its_subwords():
    rng = random.Random(SEED)
    failures = []
    checked = 0
    while checked < 1000:
        records = []
        word_texts = []
        index = 0
        for _ in range(40):
            pieces = [
                "".join(rng.choice("abcdefghij") for _ in range(rng.randint(1, 4)))
                for _ in range(rng.randint(2, 5))
            ]
            for j, fragment in enumerate(pieces):
                lead = "" if index == 0 else " " if j == 0 else ""
                records.append(
                    DumpRecord(index, lead + fragment, -rng.uniform(0.05, 3.0), rng.randint(1, 400))
                )
                index += 1
            word_texts.append("".join(pieces))
        text = " ".join(word_texts)
        document = glitter(text, PrecomputedBackend(records), GlitterConfig())
        for word in document.words:
            members = document.positions[word.group.token_start : word.group.token_end]
            if len(members) < 2:
                continue
            checked += 1
            total = math.fsum(m.surprisal for m in members)
            if abs(word.surprisal - total) > 1e-9:
                failures.append(f"word {word.group.word_index}: {word.surprisal!r} != {total!r}")
            joint = math.prod(m.probability for m in members)
            if not math.isclose(word.probability, joint, rel_tol=1e-12):
                failures.append(f"word {word.group.word_index}: probability is not the product")
    report("word surprisal equals the sum of its subword surprisals (1e-9)", failures)


def test_entropy_of_reference_distributions():
    failures = []
    for k in range(1, 11):
        n = 2**k
        uniform = TokenDistribution(tuple((i, 1.0 / n) for i in range(n)), complete=True)
        h = entropy(uniform, base=2.0)
        if abs(h - k) > 1e-9:
            failures.append(f"uniform over {n}: entropy {h!r}, expected {k}")
    if entropy(TokenDistribution(((7, 1.0),), complete=True), base=2.0) != 0.0:
        failures.append("a point mass must have exactly zero entropy")
    report("entropy is log2(n) on uniform-over-n and 0 on a point mass", failures)


def test_ngram_scores_match_independent_count_arithmetic():
    rng = random.Random(SEED)
    failures = []
    started = time.monotonic()
    for trial in range(100):
        order = rng.choice((2, 3))
        model = train_ngram(util.random_corpus(rng, 1000), order=order)
        mle = NgramBackend(model, mode="mle")
        kn = NgramBackend(model, mode="kn")
        top_table = model.counts[order - 1]
        vocab_size = len(model.vocab)

        probe = [t.token_id for t in mle.tokenize(util.random_corpus(rng, 80))]
        for i in rng.sample(range(len(probe)), min(len(probe), 12)):
            padded = [BOS_ID] * (order - 1) + probe[:i]
            context = tuple(padded[len(padded) - (order - 1) :]) if order > 1 else ()
            nexts = top_table.get(context)
            actual = probe[i]
            if nexts is None:
                expected = 0.0 if actual == BOS_ID else 1.0 / (vocab_size - 1)
            else:
                expected = nexts.get(actual, 0) / sum(nexts.values())
            got = float(mle.dense_distribution(probe[:i], from_start=True)[actual])
            if got != expected:
                failures.append(f"trial {trial}: MLE {got!r} != count ratio {expected!r}")

        for table in model.counts:
            for context in table:
                total = float(kn.dense_distribution(context, from_start=False).sum())
                if abs(total - 1.0) > 1e-6:
                    failures.append(f"trial {trial}: KN over {context} sums to {total!r}")
    elapsed = time.monotonic() - started
    if elapsed >= 30.0:
        failures.append(f"100 corpora took {elapsed:.1f}s, bound is 30s")
    report("MLE equals brute-force count ratios; KN normalizes per context (1e-6)", failures)


def test_contextless_first_token_stays_unscored():
    failures = []
    backend = PrecomputedBackend([DumpRecord(0, "lone", None, None)], tokenizer="fixed")
    document = glitter("lone", backend, GlitterConfig())
    if len(document.positions) != 1:
        failures.append(f"expected one position, got {len(document.positions)}")
    pos = document.positions[0]
    if pos.rank is not Marker.UNSCORED or not pos.flags.unscored:
        failures.append(f"first token must be marked unscored, got rank {pos.rank!r}")
    if pos.bucket != 15 or document.words[0].bucket != 15:
        failures.append(f"unscored position belongs in bucket 15, got {pos.bucket}")
    if pos.probability is not None or pos.surprisal is not None:
        failures.append("an unscored position must carry no probability")
    if document.stats.scored_words != 0:
        failures.append("a single unscorable token leaves zero scored words")
    report("single-token input without context yields one unscored bucket-15 position", failures)


def test_formulaic_runs_match_brute_force():
    rng = random.Random(SEED)
    failures = []
    for trial in range(1000):
        n = rng.randint(0, 200)
        words = [None if rng.random() < 0.12 else rng.uniform(0.0, 4.0) for _ in range(n)]
        threshold = rng.uniform(0.3, 3.5)
        min_len = rng.randint(2, 5)
        got = [
            (r.start_word, r.end_word, r.mean_surprisal)
            for r in detect_formulaic_runs(words, threshold, min_len)
        ]
        want = util.brute_force_runs(words, threshold, min_len)
        same = len(got) == len(want) and all(
            g[0] == w[0] and g[1] == w[1] and abs(g[2] - w[2]) <= 1e-12
            for g, w in zip(got, want)
        )
        if not same:
            failures.append(f"trial {trial}: {got} != {want}")
    report("formulaic runs equal brute-force maximal-window enumeration", failures)


def test_half_million_characters_through_a_64_token_window():
    rng = random.Random(SEED)
    failures = []
    model = train_ngram(util.random_corpus(rng, 4000), order=3)
    backend = NgramBackend(model, max_context_tokens=64)
    parts = []
    size = 0
    while size < 500_000:
        chunk = util.random_corpus(rng, 400)
        parts.append(chunk)
        size += len(chunk) + 1
    text = "\n".join(parts)

    started = time.monotonic()
    document = glitter(text, backend, GlitterConfig())
    elapsed = time.monotonic() - started

    n = len(document.positions)
    if len(document.normalized_text) < 500_000:
        failures.append(f"document shrank to {len(document.normalized_text)} characters")
    if [p.token_index for p in document.positions] != list(range(n)):
        failures.append("annotated positions are not dense")
    if any(p.probability is None for p in document.positions):
        failures.append("a position was left unscored")
    covered = [
        i
        for w in window_plan(n, 64, GlitterConfig().stride_fraction)
        for i in range(w.scored_start, w.scored_end)
    ]
    if covered != list(range(n)):
        failures.append("scored ranges do not partition the token positions")
    if elapsed >= 120.0:
        failures.append(f"annotation took {elapsed:.1f}s, bound is 120s")
    report("a 500k-character text is fully scored through a 64-token context window", failures)


def test_renders_round_trip_random_unicode_documents():
    rng = random.Random(SEED)
    failures = []
    backend = NgramBackend(train_ngram(util.random_corpus(rng, 600), order=2))
    alphabet = list("abcdef ghi.jkl,mno!pq<r>&\"'xyz\n\t09éüñß机器学习αβγ🙂") + ["\r\n", "  "]
    for trial in range(500):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 160)))
        document = glitter(text, backend, GlitterConfig())
        reference = document.normalized_text

        visible = util.visible_html_text(to_html(document))
        if visible != reference:
            failures.append(f"trial {trial}: HTML visible text diverged")
        plain = strip_ansi(to_ansi(document, force_color=True))
        if plain != reference:
            failures.append(f"trial {trial}: ANSI strip diverged")
        payload = to_structured(document)
        if canonical.dumps(json.loads(payload)).encode("utf-8") != payload:
            failures.append(f"trial {trial}: structured output is not canonical")
    report("HTML/ANSI round-trip 500 random documents; JSON survives a parse cycle", failures)


def test_cli_and_service_agree_byte_for_byte(tmp_path):
    guarantee = "identical input yields identical bytes from CLI and service; models round-trip"
    rng = random.Random(SEED)
    failures = []

    model = train_ngram(util.random_corpus(rng, 700), order=3)
    path = tmp_path / "roundtrip.glng"
    save_model(model, path)
    if serialize_model(load_model(path)) != serialize_model(model):
        failures.append("model save/load is not bit-exact")
    if path.read_bytes() != serialize_model(model):
        failures.append("file bytes differ from the in-memory serialization")

    save_demo_model(tmp_path / "demo.glng")
    config = tmp_path / "glitter.toml"
    config.write_text(
        '[annotation]\ntop_k = 5\n\n[[backends]]\nid = "ngram"\ntype = "ngram"\npath = "demo.glng"\n',
        encoding="utf-8",
    )
    sample = tmp_path / "sample.txt"
    sample.write_text(sample_text(), encoding="utf-8")

    cli = shutil.which("glitter")
    if cli is None:
        report(guarantee, ["the glitter console script is not installed"])
    runs = [
        subprocess.run(
            [cli, str(sample), "--config", str(config), "--backend", "ngram", "--format", "json"],
            capture_output=True,
        )
        for _ in range(2)
    ]
    for run in runs:
        if run.returncode != 0:
            failures.append(f"CLI exited {run.returncode}: {run.stderr.decode()!r}")
    if runs[0].stdout != runs[1].stdout:
        failures.append("two identical CLI invocations produced different bytes")

    settings = load_settings(config)
    client = TestClient(create_app(build_registry(settings), settings))
    request = {"text": sample_text(), "backend": "ngram"}
    responses = [client.post("/api/v1/glitter", json=request) for _ in range(2)]
    for response in responses:
        if response.status_code != 200:
            failures.append(f"service answered {response.status_code}")
    if responses[0].content != responses[1].content:
        failures.append("two identical service calls produced different bytes")
    if runs[0].stdout and responses[0].content != runs[0].stdout:
        failures.append("service bytes differ from CLI bytes for the same input")
    report(guarantee, failures)


def test_bundled_boilerplate_clause_cools_down():
    guarantee = "the bundled boilerplate clause scores below the document mean, inside a run"
    failures = []
    document = glitter(sample_text(), demo_backend(), GlitterConfig())
    text = document.normalized_text
    if text.count(BOILERPLATE_CLAUSE) != 1:
        report(guarantee, ["the sample must contain the clause exactly once"])
    start = text.index(BOILERPLATE_CLAUSE)
    end = start + len(BOILERPLATE_CLAUSE)
    # a word belongs to the clause when its first visible character does
    members = [
        (i, w)
        for i, w in enumerate(document.words)
        if start <= w.group.span[0] + len(w.group.leading_whitespace) < end
    ]
    if len(members) != len(BOILERPLATE_CLAUSE.split()):
        failures.append(f"clause maps to {len(members)} words, expected {len(BOILERPLATE_CLAUSE.split())}")
    if any(w.surprisal is None for _, w in members):
        failures.append("every clause word should be scored")
    else:
        clause_mean = math.fsum(w.surprisal for _, w in members) / len(members)
        if not clause_mean < document.stats.mean_surprisal:
            failures.append(
                f"clause mean {clause_mean:.3f} is not below document mean "
                f"{document.stats.mean_surprisal:.3f}"
            )
    first, last = members[0][0], members[-1][0]
    if not any(r.start_word <= first and last <= r.end_word for r in document.runs):
        failures.append(f"no formulaic run covers words {first}..{last}")
    report(guarantee, failures)
