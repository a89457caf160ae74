"""Remote language models over the completions wire protocol.

Speaks the echo+logprobs dialect: POST the text as a prompt with
``max_tokens: 0, echo: true, logprobs: K`` and read per-token natural-log
probabilities plus a top-K alternative list out of the response. Such
sources are top-k truncated, so the true rank of a token is only known
when it appears in its own top list; otherwise the rank is reported as
unknown and bucketing falls back to the probability thresholds.

Tokenization boundaries come from the server's ``text_offset`` array,
sliced out of the submitted text, which guarantees the pieces concatenate
back to it. Window prompts are re-tokenized by the server; if its token
boundaries inside a scored region disagree with the whole-document ones,
the mismatch is reported as a protocol error rather than misattributed.
"""

from __future__ import annotations

import math
import threading
import time
from typing import Any, Sequence

import httpx

from ..core import Marker
from ..errors import (
    BackendError,
    CapabilityError,
    ProtocolError,
    RetryableBackendError,
)
from .base import Backend, BackendCapabilities, Candidate, ScoreResult, Token

DEFAULT_TIMEOUT = 30.0
DEFAULT_MAX_ATTEMPTS = 3
DEFAULT_MAX_INFLIGHT = 4
PAYLOAD_EXCERPT_CHARS = 200


def _excerpt(body: str) -> str:
    return body[:PAYLOAD_EXCERPT_CHARS]


class HttpLogprobBackend(Backend):
    """Scores text against a completions endpoint.

    The API key is passed in by the caller (resolved from an environment
    variable, never a command-line value) and only ever leaves as an
    Authorization header. ``transport`` is injectable for tests.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key: str | None = None,
        backend_id: str = "http",
        max_context_tokens: int = 1024,
        top_k_limit: int = 5,
        timeout: float = DEFAULT_TIMEOUT,
        max_attempts: int = DEFAULT_MAX_ATTEMPTS,
        max_inflight: int = DEFAULT_MAX_INFLIGHT,
        retry_backoff: float = 0.5,
        transport: httpx.BaseTransport | None = None,
    ) -> None:
        self.endpoint = endpoint
        self.model = model
        self.backend_id = backend_id
        self.model_id = model
        self.description = f"completions endpoint {endpoint}, model {model}"
        self._max_context = max_context_tokens
        self._top_k_limit = top_k_limit
        self._max_attempts = max_attempts
        self._backoff = retry_backoff
        self._inflight = threading.Semaphore(max_inflight)
        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._client = httpx.Client(timeout=timeout, headers=headers, transport=transport)

    def close(self) -> None:
        self._client.close()

    def capabilities(self) -> BackendCapabilities:
        return BackendCapabilities(
            max_context_tokens=self._max_context,
            provides_full_distribution=False,
            top_k_limit=self._top_k_limit,
            has_bos=False,
        )

    def _post(self, prompt: str, logprobs: int) -> dict[str, Any]:
        payload = {
            "model": self.model,
            "prompt": prompt,
            "max_tokens": 0,
            "echo": True,
            "logprobs": logprobs,
        }
        last_error: Exception | None = None
        for attempt in range(self._max_attempts):
            if attempt and self._backoff > 0:
                time.sleep(self._backoff * 2 ** (attempt - 1))
            try:
                with self._inflight:
                    response = self._client.post(self.endpoint, json=payload)
            except httpx.TransportError as exc:
                last_error = exc
                continue
            if response.status_code >= 500 or response.status_code == 429:
                last_error = BackendError(f"server returned {response.status_code}")
                continue
            if response.status_code != 200:
                raise BackendError(
                    f"endpoint rejected the request with {response.status_code}: "
                    f"{_excerpt(response.text)}"
                )
            try:
                return response.json()
            except ValueError as exc:
                raise ProtocolError(
                    "response body is not JSON", _excerpt(response.text)
                ) from exc
        raise RetryableBackendError(
            f"endpoint unreachable after {self._max_attempts} attempts: {last_error}"
        )

    def _logprob_fields(self, body: dict[str, Any], prompt: str) -> tuple[list, list, list, list]:
        try:
            lp = body["choices"][0]["logprobs"]
            tokens = lp["tokens"]
            token_logprobs = lp["token_logprobs"]
            offsets = lp["text_offset"]
            top = lp.get("top_logprobs") or [None] * len(tokens)
        except (KeyError, IndexError, TypeError) as exc:
            raise ProtocolError(
                f"response is missing logprob fields: {exc}", _excerpt(repr(body))
            ) from exc
        if not (len(tokens) == len(token_logprobs) == len(offsets) == len(top)):
            raise ProtocolError("logprob arrays have inconsistent lengths", _excerpt(repr(body)))
        if offsets and (offsets[0] != 0 or any(b < a for a, b in zip(offsets, offsets[1:]))):
            raise ProtocolError("text_offset is not a sorted list from 0", _excerpt(repr(body)))
        if offsets and offsets[-1] > len(prompt):
            raise ProtocolError("text_offset exceeds prompt length", _excerpt(repr(body)))
        return tokens, token_logprobs, offsets, top

    def tokenize(self, text: str) -> list[Token]:
        if not text:
            return []
        body = self._post(text, 0)
        tokens, _, offsets, _ = self._logprob_fields(body, text)
        if not tokens:
            raise ProtocolError("endpoint returned no tokens for non-empty text", _excerpt(repr(body)))
        ends = list(offsets[1:]) + [len(text)]
        return [Token(i, text[offsets[i] : ends[i]]) for i in range(len(tokens))]

    def score(self, context: Sequence[Token], actual: Token, top_k: int) -> ScoreResult:
        if not context:
            raise CapabilityError(
                "this source has no begin-of-sequence convention; "
                "the first token of a document cannot be scored"
            )
        window = list(context) + [actual]
        return self.score_window(window, 0, len(context), len(window), top_k)[0]

    def score_window(
        self,
        tokens: Sequence[Token],
        window_start: int,
        scored_start: int,
        scored_end: int,
        top_k: int,
    ) -> list[ScoreResult]:
        if top_k > self._top_k_limit:
            raise CapabilityError(
                f"requested top-{top_k} exceeds the endpoint limit of {self._top_k_limit}"
            )
        if scored_start <= window_start:
            raise CapabilityError(
                "this source has no begin-of-sequence convention; "
                "every scored position needs preceding context in its window"
            )
        window = tokens[window_start:scored_end]
        prompt = "".join(t.piece for t in window)
        body = self._post(prompt, top_k)
        srv_tokens, srv_logprobs, srv_offsets, srv_top = self._logprob_fields(body, prompt)
        srv_ends = list(srv_offsets[1:]) + [len(prompt)]
        by_start = {start: i for i, start in enumerate(srv_offsets)}

        starts: list[int] = []
        pos = 0
        for t in window:
            starts.append(pos)
            pos += len(t.piece)
        ends = starts[1:] + [pos]

        results: list[ScoreResult] = []
        for i in range(scored_start - window_start, scored_end - window_start):
            srv_i = by_start.get(starts[i])
            if srv_i is None or srv_ends[srv_i] != ends[i]:
                raise ProtocolError(
                    f"server token boundaries disagree at window offset {starts[i]}",
                    _excerpt(repr(srv_offsets)),
                )
            lp = srv_logprobs[srv_i]
            if lp is None:
                raise ProtocolError(
                    f"server omitted the logprob of a context-bearing position {srv_i}",
                    _excerpt(repr(srv_logprobs)),
                )
            results.append(self._position_result(float(lp), srv_tokens[srv_i], srv_top[srv_i]))
        return results

    def _position_result(
        self, logprob: float, actual_piece: str, top: dict[str, float] | None
    ) -> ScoreResult:
        actual_p = math.exp(logprob)
        candidates: list[Candidate] = []
        if top:
            ranked = sorted(top.items(), key=lambda kv: (-kv[1], kv[0]))
            candidates = [Candidate(None, piece, math.exp(lp)) for piece, lp in ranked]
        rank: int | Marker = Marker.UNKNOWN
        for idx, cand in enumerate(candidates):
            if cand.piece == actual_piece:
                rank = idx + 1
                break
        covered = math.fsum(c.probability for c in candidates)
        return ScoreResult(
            actual_probability=actual_p,
            actual_rank=rank,
            top_candidates=tuple(candidates),
            tail_mass=max(0.0, 1.0 - covered),
        )
