"""Renderers: HTML heat map, ANSI terminal heat map, structured JSON.

Both visual renderers color whole words by bucket and underline formulaic
runs. The visible text is exactly the normalized document text in both
cases: HTML tooltips live in attributes and pseudo-elements, ANSI styling
lives in escape sequences, so stripping the markup recovers the input.
"""

from __future__ import annotations

import html
import math
import os
import re
from typing import Any

from . import canonical
from .core import Marker
from .palette import Palette, default_palette, foreground_for, hex_to_rgb
from .pipeline import AnnotatedDocument, PositionAnnotation, WordAnnotation

SCHEMA_VERSION = 1

_ANSI = re.compile(r"\x1b\[[0-9;]*m")


def strip_ansi(text: str) -> str:
    return _ANSI.sub("", text)


def _unit(base: float) -> str:
    if base == 2.0:
        return "bits"
    if abs(base - math.e) < 1e-12:
        return "nats"
    return f"log{base:g} units"


def _run_words(document: AnnotatedDocument) -> set[int]:
    covered: set[int] = set()
    for run in document.runs:
        covered.update(range(run.start_word, run.end_word + 1))
    return covered


def _label(piece: str) -> str:
    return piece.strip() or repr(piece)


def _position_tip(pos: PositionAnnotation, unit: str) -> list[str]:
    if pos.flags.unscored:
        return [f"token {_label(pos.piece)}: unscored (no preceding context)"]
    if pos.rank is Marker.UNKNOWN:
        rank_label = "rank unknown"
    else:
        rank_label = f"rank {pos.rank}"
    lines = [
        f"token {_label(pos.piece)}: "
        f"{pos.surprisal:.2f} {unit}{' (capped)' if pos.flags.capped else ''}, {rank_label}"
    ]
    for i, cand in enumerate(pos.top_candidates, start=1):
        lines.append(f"  {i}. {_label(cand.piece)}  p={cand.probability:.3g}")
    return lines


def _word_tip(document: AnnotatedDocument, word: WordAnnotation, in_run: bool) -> str:
    unit = _unit(document.base)
    if word.surprisal is None:
        head = "unscored"
    else:
        head = (
            f"surprisal {word.surprisal:.2f} {unit}"
            f"{' (capped)' if word.capped else ''}, p={word.probability:.3g}"
        )
    lines = [head, f"bucket {word.bucket} of 15" + (", formulaic run" if in_run else "")]
    for pos in document.positions[word.group.token_start : word.group.token_end]:
        lines.extend(_position_tip(pos, unit))
    return "\n".join(lines)


_HTML_PAGE = """<!doctype html>
<html>
<head>
<meta charset="utf-8">
<title>surprisal heat map</title>
<style>
body {{ margin: 2rem; font: 15px/1.7 system-ui, sans-serif; background: #ffffff; color: #101010; }}
.glitter {{ white-space: pre-wrap; max-width: 60rem; }}
.glitter .w {{ position: relative; border-radius: 2px; }}
.glitter .w:hover::after {{
  content: attr(data-tip);
  position: absolute; left: 0; top: 1.6em; z-index: 9;
  white-space: pre; font-size: 0.8em; line-height: 1.5;
  background: #1c1c1c; color: #f0f0f0; padding: 0.5em 0.7em;
  border-radius: 4px; box-shadow: 0 2px 8px rgba(0,0,0,0.4);
}}
.glitter .fr {{ text-decoration: underline dotted; text-underline-offset: 3px; }}
{light_rules}
@media (prefers-color-scheme: dark) {{
body {{ background: #141414; color: #f0f0f0; }}
{dark_rules}
}}
</style>
</head>
<body>
<div class="glitter" id="glitter-text">{body}</div>
</body>
</html>
"""


def _bucket_rules(colors: tuple[str, ...]) -> str:
    rules = []
    for b, bg in enumerate(colors):
        fr, fg_, fb = foreground_for(bg)
        rules.append(f".glitter .b{b} {{ background: {bg}; color: rgb({fr},{fg_},{fb}); }}")
    return "\n".join(rules)


def _attr(value: str) -> str:
    return html.escape(value, quote=True).replace("\n", "&#10;")


def to_html(document: AnnotatedDocument, palette: Palette | None = None) -> str:
    """A standalone page: words colored by bucket, hover for details,
    light and dark palettes switched by the client's color scheme."""
    palette = palette or default_palette()
    in_run = _run_words(document)
    parts: list[str] = []
    for word in document.words:
        start, end = word.group.span
        text = document.normalized_text[start:end]
        classes = f"w b{word.bucket}" + (" fr" if word.group.word_index in in_run else "")
        tip = _word_tip(document, word, word.group.word_index in in_run)
        parts.append(
            f'<span class="{classes}" data-tip="{_attr(tip)}">{html.escape(text, quote=False)}</span>'
        )
    return _HTML_PAGE.format(
        light_rules=_bucket_rules(palette.light),
        dark_rules=_bucket_rules(palette.dark),
        body="".join(parts),
    )


def color_enabled(force_color: bool = False, env: dict[str, str] | None = None) -> bool:
    """The NO_COLOR convention: any non-empty value disables color unless
    the caller forces it."""
    if force_color:
        return True
    env = os.environ if env is None else env
    return not env.get("NO_COLOR")


def to_ansi(
    document: AnnotatedDocument,
    palette: Palette | None = None,
    theme: str = "dark",
    force_color: bool = False,
) -> str:
    """Terminal heat map with 24-bit backgrounds, one styled region per
    word, formulaic runs underlined. Without color it is the plain text."""
    if not color_enabled(force_color):
        return document.normalized_text
    palette = palette or default_palette()
    colors = palette.colors(theme)
    in_run = _run_words(document)
    out: list[str] = []
    for word in document.words:
        start, end = word.group.span
        text = document.normalized_text[start:end]
        bg = colors[word.bucket]
        br, bg_, bb = hex_to_rgb(bg)
        fr, fg_, fb = foreground_for(bg)
        prefix = f"\x1b[48;2;{br};{bg_};{bb}m\x1b[38;2;{fr};{fg_};{fb}m"
        if word.group.word_index in in_run:
            prefix += "\x1b[4m"
        # reset before every newline so backgrounds never bleed across lines
        for i, segment in enumerate(text.split("\n")):
            if i:
                out.append("\n")
            if segment:
                out.append(f"{prefix}{segment}\x1b[0m")
    return "".join(out)


def _position_payload(pos: PositionAnnotation) -> dict[str, Any]:
    return {
        "index": pos.token_index,
        "piece": pos.piece,
        "span": [pos.span[0], pos.span[1]],
        "probability": pos.probability,
        "surprisal": pos.surprisal,
        "rank": pos.rank if isinstance(pos.rank, int) else None,
        "bucket": pos.bucket,
        "flags": {
            "capped": pos.flags.capped,
            "estimated_rank": pos.flags.estimated_rank,
            "unscored": pos.flags.unscored,
        },
        "top": [{"piece": c.piece, "probability": c.probability} for c in pos.top_candidates],
    }


def _word_payload(word: WordAnnotation) -> dict[str, Any]:
    return {
        "index": word.group.word_index,
        "span": [word.group.span[0], word.group.span[1]],
        "tokens": [word.group.token_start, word.group.token_end],
        "probability": word.probability,
        "surprisal": word.surprisal,
        "bucket": word.bucket,
        "capped": word.capped,
    }


def to_structured(document: AnnotatedDocument) -> bytes:
    """Canonical JSON bytes: same document, same bytes, everywhere."""
    payload = {
        "version": SCHEMA_VERSION,
        "base": document.base,
        "provenance": {
            "backend_id": document.provenance.backend_id,
            "model_id": document.provenance.model_id,
            "config_digest": document.provenance.config_digest,
        },
        "text": document.normalized_text,
        "positions": [_position_payload(p) for p in document.positions],
        "words": [_word_payload(w) for w in document.words],
        "runs": [
            {"start_word": r.start_word, "end_word": r.end_word, "mean_surprisal": r.mean_surprisal}
            for r in document.runs
        ],
        "stats": {
            "token_count": document.stats.token_count,
            "word_count": document.stats.word_count,
            "scored_words": document.stats.scored_words,
            "mean_surprisal": document.stats.mean_surprisal,
            "perplexity": document.stats.perplexity,
            "bucket_histogram": list(document.stats.bucket_histogram),
            "formulaic_coverage": document.stats.formulaic_coverage,
        },
    }
    return canonical.dump_bytes(payload)
