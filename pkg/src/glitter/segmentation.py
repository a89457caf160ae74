"""Text normalization, token alignment and word grouping.

The annotation pipeline works on a normalized copy of the input (Unicode
NFC, LF line endings) but callers often need character offsets into the raw
text they submitted, so normalization also produces an offset map. Backends
return token pieces; this module verifies that those pieces tile the
normalized text exactly and groups consecutive tokens into display words.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from typing import Sequence

from .errors import AlignmentError


@dataclass(frozen=True)
class NormalizedText:
    """Normalized text plus a map from its offsets back to raw offsets.

    ``to_raw[i]`` is the offset in the raw input where the segment that
    produced normalized character i begins. Within a segment that NFC
    rewrote as a unit, all positions map to the segment start; the map is
    exact wherever normalization was the identity.
    """

    text: str
    to_raw: tuple[int, ...]

    def raw_offset(self, norm_offset: int) -> int:
        if norm_offset == len(self.text):
            return self.to_raw[-1] if self.to_raw else 0
        return self.to_raw[norm_offset]


def _nfc_with_map(text: str) -> tuple[str, list[int]]:
    target = unicodedata.normalize("NFC", text)
    if target == text:
        return target, list(range(len(text)))
    # Cut the raw text before every starter (combining class 0): NFC never
    # recomposes across such a boundary, so each segment normalizes
    # independently. Greedy prefix matching locates each normalized segment
    # inside the target; if a cut happens to split a composition, drop that
    # cut and retry with the merged segment. The whole-string segment always
    # matches, so this terminates with correct text in every case; only the
    # map granularity degrades.
    cuts = [i for i, ch in enumerate(text) if unicodedata.combining(ch) == 0]
    if not cuts or cuts[0] != 0:
        cuts.insert(0, 0)
    while True:
        out: list[str] = []
        to_raw: list[int] = []
        pos = 0
        failed_at: int | None = None
        for seg_index, seg_start in enumerate(cuts):
            seg_end = cuts[seg_index + 1] if seg_index + 1 < len(cuts) else len(text)
            piece = unicodedata.normalize("NFC", text[seg_start:seg_end])
            if not target.startswith(piece, pos):
                failed_at = seg_index
                break
            out.append(piece)
            to_raw.extend([seg_start] * len(piece))
            pos += len(piece)
        if failed_at is None and pos == len(target):
            return target, to_raw
        # Merge the failing segment (or the last one, if only the total
        # length came up short) into its predecessor and try again.
        drop = failed_at if failed_at is not None and failed_at > 0 else len(cuts) - 1
        if drop <= 0:
            # Single segment left and it still failed: cannot happen, the
            # whole-string normalization is the target by definition.
            raise AlignmentError("normalization map construction failed", 0)
        del cuts[drop]


def normalize(raw: str) -> NormalizedText:
    """NFC-normalize and convert CRLF line endings to LF, keeping offsets."""
    # CRLF -> LF first, tracking raw offsets through the deletions.
    if "\r\n" in raw:
        chars: list[str] = []
        offsets: list[int] = []
        i = 0
        while i < len(raw):
            if raw[i] == "\r" and i + 1 < len(raw) and raw[i + 1] == "\n":
                chars.append("\n")
                offsets.append(i)
                i += 2
            else:
                chars.append(raw[i])
                offsets.append(i)
                i += 1
        stripped = "".join(chars)
    else:
        stripped = raw
        offsets = list(range(len(raw)))
    normalized, seg_map = _nfc_with_map(stripped)
    return NormalizedText(normalized, tuple(offsets[j] for j in seg_map))


@dataclass(frozen=True)
class TokenSpan:
    """A token's piece and its half-open character span in normalized text."""

    token_index: int
    piece: str
    start: int
    end: int


def align_tokens(text: str, pieces: Sequence[str]) -> list[TokenSpan]:
    """Tile ``text`` with ``pieces`` left to right.

    Every piece must match the text exactly at the current offset and the
    concatenation must consume the whole text; any divergence raises
    AlignmentError with the first offending offset.
    """
    spans: list[TokenSpan] = []
    pos = 0
    for idx, piece in enumerate(pieces):
        if not text.startswith(piece, pos):
            raise AlignmentError(
                f"token {idx} piece {piece!r} does not match text at offset {pos}", pos
            )
        spans.append(TokenSpan(idx, piece, pos, pos + len(piece)))
        pos += len(piece)
    if pos != len(text):
        raise AlignmentError(f"tokens cover only {pos} of {len(text)} characters", pos)
    return spans


def _is_punct(piece: str) -> bool:
    stripped = piece.strip()
    return bool(stripped) and all(unicodedata.category(ch).startswith("P") for ch in stripped)


@dataclass(frozen=True)
class WordGroup:
    """A display word: one or more consecutive tokens.

    ``span`` covers the word's tokens including any leading whitespace
    carried by its first token, so word spans tile the normalized text.
    """

    word_index: int
    token_start: int
    token_end: int  # exclusive
    span: tuple[int, int]
    leading_whitespace: str


def group_words(spans: Sequence[TokenSpan]) -> list[WordGroup]:
    """Group consecutive token spans into words.

    A token starts a new word when it is the first token, its piece begins
    with whitespace, the previous piece ends with whitespace, either piece
    is punctuation (punctuation is always a single-token word), or the
    previous piece is entirely whitespace.
    """
    starts: list[int] = []
    for i, span in enumerate(spans):
        if i == 0:
            starts.append(i)
            continue
        prev = spans[i - 1].piece
        cur = span.piece
        if (
            (cur[:1].isspace() if cur else False)
            or (prev[-1:].isspace() if prev else True)
            or prev.isspace()
            or not prev
            or _is_punct(prev)
            or _is_punct(cur)
        ):
            starts.append(i)
    groups: list[WordGroup] = []
    for w, tok_start in enumerate(starts):
        tok_end = starts[w + 1] if w + 1 < len(starts) else len(spans)
        first = spans[tok_start]
        last = spans[tok_end - 1]
        piece = first.piece
        lead_len = len(piece) - len(piece.lstrip())
        groups.append(
            WordGroup(
                word_index=w,
                token_start=tok_start,
                token_end=tok_end,
                span=(first.start, last.end),
                leading_whitespace=piece[:lead_len],
            )
        )
    return groups


def word_text(text: str, group: WordGroup) -> str:
    """The word's visible text, leading whitespace included."""
    return text[group.span[0] : group.span[1]]
