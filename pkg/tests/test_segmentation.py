"""Normalization, token alignment and word grouping."""

from __future__ import annotations

import unicodedata

import pytest
from hypothesis import given, strategies as st

from glitter.errors import AlignmentError
from glitter.segmentation import (
    TokenSpan,
    align_tokens,
    group_words,
    normalize,
    word_text,
)


class TestNormalize:
    def test_identity_for_plain_ascii(self):
        norm = normalize("hello world")
        assert norm.text == "hello world"
        assert norm.to_raw == tuple(range(11))

    def test_crlf_collapses_with_offsets(self):
        norm = normalize("a\r\nb")
        assert norm.text == "a\nb"
        assert norm.to_raw == (0, 1, 3)

    def test_lone_cr_survives(self):
        assert normalize("a\rb").text == "a\rb"

    def test_nfc_composition(self):
        norm = normalize("état")  # e + combining acute
        assert norm.text == "état"
        assert norm.to_raw[0] == 0
        assert norm.to_raw[1] == 2  # 't' started at raw offset 2

    def test_crlf_then_composition(self):
        norm = normalize("x\r\né")
        assert norm.text == "x\né"
        assert norm.to_raw == (0, 1, 3)

    def test_raw_offset_at_end(self):
        norm = normalize("ab")
        assert norm.raw_offset(2) == 1
        assert normalize("").raw_offset(0) == 0

    @given(st.text(max_size=80))
    def test_matches_stdlib_normalization(self, raw):
        norm = normalize(raw)
        assert norm.text == unicodedata.normalize("NFC", raw.replace("\r\n", "\n"))
        assert len(norm.to_raw) == len(norm.text)
        assert list(norm.to_raw) == sorted(norm.to_raw)
        for offset in norm.to_raw:
            assert 0 <= offset < max(1, len(raw))


class TestAlignTokens:
    def test_exact_tiling(self):
        spans = align_tokens("ab cd", ["ab", " cd"])
        assert spans == [TokenSpan(0, "ab", 0, 2), TokenSpan(1, " cd", 2, 5)]

    def test_mismatch_reports_offset(self):
        with pytest.raises(AlignmentError) as err:
            align_tokens("abcd", ["ab", "xx"])
        assert err.value.offset == 2

    def test_shortfall_reports_offset(self):
        with pytest.raises(AlignmentError) as err:
            align_tokens("abcd", ["ab"])
        assert err.value.offset == 2

    def test_overrun_is_a_mismatch(self):
        with pytest.raises(AlignmentError):
            align_tokens("ab", ["ab", "c"])

    def test_empty(self):
        assert align_tokens("", []) == []

    @given(st.text(min_size=1, max_size=60), st.data())
    def test_random_tilings_align(self, text, data):
        cuts = sorted(
            data.draw(
                st.sets(st.integers(min_value=1, max_value=len(text)), max_size=8)
            )
        )
        bounds = [0] + [c for c in cuts if c < len(text)] + [len(text)]
        pieces = [text[a:b] for a, b in zip(bounds, bounds[1:]) if a != b]
        spans = align_tokens(text, pieces)
        assert "".join(s.piece for s in spans) == text
        assert all(text[s.start : s.end] == s.piece for s in spans)


def spans_for(pieces):
    return align_tokens("".join(pieces), pieces)


class TestGroupWords:
    def test_punctuation_is_its_own_word(self):
        groups = group_words(spans_for(["Hello", ",", " world", "."]))
        assert [(g.token_start, g.token_end) for g in groups] == [(0, 1), (1, 2), (2, 3), (3, 4)]

    def test_subword_pieces_merge(self):
        groups = group_words(spans_for(["un", "believ", "able"]))
        assert len(groups) == 1
        assert groups[0].token_end == 3

    def test_leading_whitespace_starts_a_word(self):
        groups = group_words(spans_for(["the", " big", " cat"]))
        assert len(groups) == 3
        assert groups[1].leading_whitespace == " "

    def test_trailing_whitespace_on_previous_piece_splits(self):
        groups = group_words(spans_for(["the ", "cat"]))
        assert len(groups) == 2

    def test_whitespace_only_piece(self):
        groups = group_words(spans_for(["a", "  ", "b"]))
        assert len(groups) == 3

    def test_spans_tile_the_text(self):
        pieces = ["Once", " upon", " a", " time", ",", " there", "."]
        text = "".join(pieces)
        groups = group_words(spans_for(pieces))
        assert groups[0].span[0] == 0
        assert groups[-1].span[1] == len(text)
        for a, b in zip(groups, groups[1:]):
            assert a.span[1] == b.span[0]
        assert "".join(word_text(text, g) for g in groups) == text

    def test_empty(self):
        assert group_words([]) == []

    def test_unicode_punctuation(self):
        # guillemets are category Pi/Pf
        groups = group_words(spans_for(["«", "word", "»"]))
        assert len(groups) == 3

    @given(
        st.lists(
            st.text(
                alphabet=st.characters(whitelist_categories=("Ll", "Po", "Zs")),
                min_size=1,
                max_size=6,
            ),
            min_size=1,
            max_size=12,
        )
    )
    def test_groups_partition_tokens(self, pieces):
        groups = group_words(spans_for(pieces))
        covered = []
        for g in groups:
            covered.extend(range(g.token_start, g.token_end))
        assert covered == list(range(len(pieces)))
        text = "".join(pieces)
        assert "".join(word_text(text, g) for g in groups) == text
