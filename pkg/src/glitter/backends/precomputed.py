"""Replay backend for precomputed score dumps.

A dump is newline-delimited JSON: one header line, then one record per
token position in order. Logprobs are natural logs regardless of the
display base used elsewhere; the header says so explicitly. A null logprob
marks a position the producing source could not score (typically position
zero of a source without a begin-of-sequence convention) and a missing or
null rank marks a scored position whose true rank was unknown.

Replaying a dump against any text other than the one it was produced from
fails alignment, by construction: the pieces will not tile the text.
"""

from __future__ import annotations

import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from ..core import Marker
from ..errors import CapabilityError, ModelFormatError
from .base import Backend, BackendCapabilities, Candidate, ScoreResult, Token

DUMP_KIND = "glitter-dump"
DUMP_VERSION = 1


@dataclass(frozen=True)
class DumpRecord:
    """Stored scores of one token position."""

    index: int
    piece: str
    logprob: float | None
    rank: int | None
    top: tuple[tuple[str, float], ...] = field(default_factory=tuple)


def write_dump(path: str | Path | io.TextIOBase, records: Iterable[DumpRecord], tokenizer: str) -> None:
    lines = serialize_dump(records, tokenizer)
    if isinstance(path, io.TextIOBase):
        path.write(lines)
    else:
        Path(path).write_text(lines, encoding="utf-8")


def serialize_dump(records: Iterable[DumpRecord], tokenizer: str) -> str:
    header = {
        "kind": DUMP_KIND,
        "version": DUMP_VERSION,
        "tokenizer": tokenizer,
        "logprob_base": "e",
    }
    out = [json.dumps(header, sort_keys=True, separators=(",", ":"))]
    for rec in records:
        row = {
            "index": rec.index,
            "piece": rec.piece,
            "logprob": rec.logprob,
            "rank": rec.rank,
            "top": [{"piece": p, "logprob": lp} for p, lp in rec.top],
        }
        out.append(json.dumps(row, sort_keys=True, separators=(",", ":"), ensure_ascii=False))
    return "\n".join(out) + "\n"


def _parse_record(line: str, lineno: int) -> DumpRecord:
    try:
        row = json.loads(line)
        top = tuple((c["piece"], float(c["logprob"])) for c in row.get("top", []))
        logprob = row["logprob"]
        rank = row.get("rank")
        return DumpRecord(
            index=int(row["index"]),
            piece=str(row["piece"]),
            logprob=None if logprob is None else float(logprob),
            rank=None if rank is None else int(rank),
            top=top,
        )
    except (ValueError, KeyError, TypeError) as exc:
        raise ModelFormatError(f"dump line {lineno} is malformed: {exc}") from exc


def read_dump(path: str | Path | io.TextIOBase) -> tuple[dict, list[DumpRecord]]:
    if isinstance(path, io.TextIOBase):
        text = path.read()
    else:
        text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.split("\n") if ln.strip()]
    if not lines:
        raise ModelFormatError("dump is empty, expected a header line")
    try:
        header = json.loads(lines[0])
    except ValueError as exc:
        raise ModelFormatError(f"dump header is not JSON: {exc}") from exc
    if not isinstance(header, dict) or header.get("kind") != DUMP_KIND:
        raise ModelFormatError("dump header is missing the kind marker")
    if header.get("version") != DUMP_VERSION:
        raise ModelFormatError(f"unsupported dump version {header.get('version')!r}")
    if header.get("logprob_base") != "e":
        raise ModelFormatError("dump logprobs must be natural logs")
    records = [_parse_record(ln, i + 2) for i, ln in enumerate(lines[1:])]
    for i, rec in enumerate(records):
        if rec.index != i:
            raise ModelFormatError(f"dump records out of order: expected index {i}, got {rec.index}")
    return header, records


class PrecomputedBackend(Backend):
    """Serves scores verbatim from a dump, no model in sight."""

    def __init__(
        self,
        records: Sequence[DumpRecord],
        tokenizer: str = "unknown",
        backend_id: str = "precomputed",
    ) -> None:
        self.records = tuple(records)
        self.tokenizer = tokenizer
        self.backend_id = backend_id
        serialized = serialize_dump(self.records, tokenizer)
        self.model_id = hashlib.sha256(serialized.encode("utf-8")).hexdigest()[:12]
        self.description = f"precomputed dump of {len(self.records)} positions ({tokenizer})"
        self._has_bos = bool(self.records) and self.records[0].logprob is not None
        self._top_k_limit = max((len(r.top) for r in self.records), default=0)

    @classmethod
    def from_path(cls, path: str | Path, backend_id: str = "precomputed") -> "PrecomputedBackend":
        header, records = read_dump(path)
        return cls(records, tokenizer=str(header.get("tokenizer", "unknown")), backend_id=backend_id)

    def capabilities(self) -> BackendCapabilities:
        return BackendCapabilities(
            max_context_tokens=None,
            provides_full_distribution=False,
            top_k_limit=self._top_k_limit,
            has_bos=self._has_bos,
        )

    def tokenize(self, text: str) -> list[Token]:
        return [Token(rec.index, rec.piece) for rec in self.records]

    def score(self, context: Sequence[Token], actual: Token, top_k: int) -> ScoreResult:
        if top_k > self._top_k_limit:
            raise CapabilityError(
                f"dump stores at most {self._top_k_limit} candidates, requested {top_k}"
            )
        position = actual.token_id
        if not 0 <= position < len(self.records):
            raise CapabilityError(f"position {position} is outside the dump")
        if len(context) != position:
            raise CapabilityError(
                "a dump can only replay its own context: "
                f"position {position} scored with {len(context)} context tokens"
            )
        rec = self.records[position]
        if rec.logprob is None:
            raise CapabilityError(f"position {position} has no stored probability")
        candidates = tuple(
            Candidate(None, piece, math.exp(lp))
            for piece, lp in sorted(rec.top, key=lambda e: (-e[1], e[0]))[:top_k]
        )
        covered = math.fsum(c.probability for c in candidates)
        return ScoreResult(
            actual_probability=math.exp(rec.logprob),
            actual_rank=Marker.UNKNOWN if rec.rank is None else rec.rank,
            top_candidates=candidates,
            tail_mass=max(0.0, 1.0 - covered),
        )
