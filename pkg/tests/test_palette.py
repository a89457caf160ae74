"""Palette files and foreground selection."""

from __future__ import annotations

import pytest

from glitter.errors import ConfigError
from glitter.palette import (
    Palette,
    default_palette,
    foreground_for,
    hex_to_rgb,
    load_palette,
    parse_palette,
    relative_luminance,
)


def test_default_palette_shape():
    palette = default_palette()
    assert palette.name == "thermal-v1"
    assert len(palette.light) == 16
    assert len(palette.dark) == 16
    assert all(c.startswith("#") and c == c.lower() for c in palette.light + palette.dark)


def test_theme_selection():
    palette = default_palette()
    assert palette.colors("light") == palette.light
    assert palette.colors("dark") == palette.dark
    with pytest.raises(ConfigError):
        palette.colors("sepia")


def test_parse_ignores_comments_and_blanks():
    lines = ["; a comment", ""]
    lines += [f"#0000{i:02x}" for i in range(32)]
    palette = parse_palette("\n".join(lines), "custom")
    assert palette.light[0] == "#000000"
    assert palette.dark[15] == "#00001f"


def test_parse_rejects_wrong_count():
    text = "\n".join(["#000000"] * 31)
    with pytest.raises(ConfigError, match="32 colors"):
        parse_palette(text, "short")


def test_parse_rejects_bad_hex():
    text = "\n".join(["#000000"] * 31 + ["nope"])
    with pytest.raises(ConfigError, match="bad color"):
        parse_palette(text, "broken")


def test_constructor_validates_length():
    with pytest.raises(ConfigError):
        Palette("p", ("#000000",) * 15, ("#000000",) * 16)


def test_load_palette_round_trip(tmp_path):
    path = tmp_path / "p.palette"
    path.write_text("\n".join([f"#aabb{i:02x}" for i in range(32)]), encoding="utf-8")
    palette = load_palette(path)
    assert palette.name == "p"
    assert palette.light[1] == "#aabb01"


def test_load_palette_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_palette(tmp_path / "absent.palette")


def test_hex_to_rgb():
    assert hex_to_rgb("#0a1b2c") == (10, 27, 44)


def test_luminance_extremes():
    assert relative_luminance("#ffffff") == pytest.approx(1.0)
    assert relative_luminance("#000000") == 0.0


def _contrast(fg_luminance: float, bg: str) -> float:
    lo, hi = sorted((fg_luminance, relative_luminance(bg)))
    return (hi + 0.05) / (lo + 0.05)


DARK_TEXT_L = relative_luminance("#101010")
LIGHT_TEXT_L = relative_luminance("#f0f0f0")


def test_foreground_contrast():
    assert foreground_for("#ffffff") == (16, 16, 16)
    assert foreground_for("#000000") == (240, 240, 240)
    # every bundled background keeps its text readable on both themes
    for color in default_palette().light:
        assert foreground_for(color) == (16, 16, 16)
    for color in default_palette().dark:
        assert foreground_for(color) == (240, 240, 240)


def test_foreground_choice_maximizes_contrast():
    for color in default_palette().light + default_palette().dark:
        chosen = foreground_for(color)
        picked_dark_text = chosen == (16, 16, 16)
        dark_c = _contrast(DARK_TEXT_L, color)
        light_c = _contrast(LIGHT_TEXT_L, color)
        assert (dark_c >= light_c) == picked_dark_text, color


def test_bundled_colors_reach_aa_contrast():
    for color in default_palette().light + default_palette().dark:
        fg = foreground_for(color)
        fg_l = DARK_TEXT_L if fg == (16, 16, 16) else LIGHT_TEXT_L
        assert _contrast(fg_l, color) >= 4.5, color
