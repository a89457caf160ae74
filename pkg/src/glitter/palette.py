"""Bucket color palettes.

A palette file holds 32 hex colors, one per line: 16 light-theme
backgrounds (dark text) followed by 16 dark-theme backgrounds (light
text), index = bucket. Blank lines and lines starting with ';' are
ignored. The bundled thermal ramp runs cool blue for the most predictable
bucket through green and amber to hot red for the least predictable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .core import NUM_BUCKETS
from .errors import ConfigError

_HEX = re.compile(r"^#[0-9a-fA-F]{6}$")

DEFAULT_PALETTE_NAME = "thermal-v1"


@dataclass(frozen=True)
class Palette:
    name: str
    light: tuple[str, ...]
    dark: tuple[str, ...]

    def __post_init__(self) -> None:
        for block in (self.light, self.dark):
            if len(block) != NUM_BUCKETS:
                raise ConfigError(f"palette {self.name!r} needs {NUM_BUCKETS} colors per theme")
            for color in block:
                if not _HEX.match(color):
                    raise ConfigError(f"palette {self.name!r}: bad color {color!r}")

    def colors(self, theme: str) -> tuple[str, ...]:
        if theme == "light":
            return self.light
        if theme == "dark":
            return self.dark
        raise ConfigError(f"theme must be 'light' or 'dark', got {theme!r}")


def parse_palette(text: str, name: str) -> Palette:
    colors = [ln.strip() for ln in text.splitlines()]
    colors = [c for c in colors if c and not c.startswith(";")]
    if len(colors) != 2 * NUM_BUCKETS:
        raise ConfigError(
            f"palette {name!r} must contain {2 * NUM_BUCKETS} colors, found {len(colors)}"
        )
    return Palette(
        name=name,
        light=tuple(c.lower() for c in colors[:NUM_BUCKETS]),
        dark=tuple(c.lower() for c in colors[NUM_BUCKETS:]),
    )


def load_palette(path: str | Path) -> Palette:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read palette file {path}: {exc}") from exc
    return parse_palette(text, path.stem)


def default_palette() -> Palette:
    text = resources.files("glitter.data").joinpath("thermal.palette").read_text("utf-8")
    return parse_palette(text, DEFAULT_PALETTE_NAME)


def hex_to_rgb(color: str) -> tuple[int, int, int]:
    return int(color[1:3], 16), int(color[3:5], 16), int(color[5:7], 16)


def relative_luminance(color: str) -> float:
    """WCAG relative luminance, for picking a readable foreground."""

    def channel(v: int) -> float:
        c = v / 255.0
        return c / 12.92 if c <= 0.04045 else ((c + 0.055) / 1.055) ** 2.4

    r, g, b = hex_to_rgb(color)
    return 0.2126 * channel(r) + 0.7152 * channel(g) + 0.0722 * channel(b)


def foreground_for(color: str) -> tuple[int, int, int]:
    """Black on light backgrounds, white on dark ones.

    0.1754 is where #101010 and #f0f0f0 text tie on contrast ratio, so
    whichever side of it the background falls, the chosen text wins.
    """
    return (16, 16, 16) if relative_luminance(color) > 0.1754 else (240, 240, 240)
