"""Binary serialization of n-gram models.

Layout (all integers little-endian):

    magic     4 bytes  "GLNG"
    version   u16      currently 1
    order     u16
    discount  f64
    vocab     u32 entry count, then per entry u32 byte length + UTF-8 bytes
    tables    for each order k = 1..N:
                u64 triple count, then per triple
                (k-1) context ids (u32 each), next id (u32), count (u64)
              triples sorted lexicographically by (context, next id)
    crc32     u32 over every preceding byte, magic included

The sort makes serialization a pure function of the model, so identical
models produce identical bytes and a save/load round trip is bit-exact.
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

from ..errors import DomainError, ModelFormatError, VocabularyError
from .ngram import NgramModel, iter_ngrams, table_from_triples

MAGIC = b"GLNG"
VERSION = 1


def serialize_model(model: NgramModel) -> bytes:
    out = bytearray()
    out += MAGIC
    out += struct.pack("<HH", VERSION, model.order)
    out += struct.pack("<d", model.discount)
    out += struct.pack("<I", len(model.vocab))
    for piece in model.vocab:
        raw = piece.encode("utf-8")
        out += struct.pack("<I", len(raw))
        out += raw
    for k in range(1, model.order + 1):
        triples = list(iter_ngrams(model.counts[k - 1]))
        out += struct.pack("<Q", len(triples))
        fmt = "<" + "I" * k + "Q"
        for ctx, nxt, count in triples:
            out += struct.pack(fmt, *ctx, nxt, count)
    out += struct.pack("<I", zlib.crc32(bytes(out)))
    return bytes(out)


class _Reader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ModelFormatError(
                f"truncated model file: need {n} bytes at offset {self.pos}, "
                f"have {len(self.data) - self.pos}"
            )
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str) -> tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def deserialize_model(data: bytes) -> NgramModel:
    if len(data) < 4 + 4:
        raise ModelFormatError("file too short to be a model")
    body, (stored_crc,) = data[:-4], struct.unpack("<I", data[-4:])
    actual_crc = zlib.crc32(body)
    if stored_crc != actual_crc:
        raise ModelFormatError(
            f"checksum mismatch: stored {stored_crc:#010x}, computed {actual_crc:#010x}"
        )
    r = _Reader(body)
    if r.take(4) != MAGIC:
        raise ModelFormatError("bad magic: not a model file")
    version, order = r.unpack("<HH")
    if version != VERSION:
        raise ModelFormatError(f"unsupported format version {version}")
    (discount,) = r.unpack("<d")
    (vocab_len,) = r.unpack("<I")
    vocab = []
    for _ in range(vocab_len):
        (piece_len,) = r.unpack("<I")
        try:
            vocab.append(r.take(piece_len).decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise ModelFormatError(f"vocabulary entry is not valid UTF-8: {exc}") from exc
    tables = []
    for k in range(1, order + 1):
        (n_triples,) = r.unpack("<Q")
        fmt = "<" + "I" * k + "Q"
        triples = []
        for _ in range(n_triples):
            values = r.unpack(fmt)
            ctx, nxt, count = values[: k - 1], values[k - 1], values[k]
            for tid in (*ctx, nxt):
                if tid >= vocab_len:
                    raise ModelFormatError(f"token id {tid} outside vocabulary of {vocab_len}")
            triples.append((tuple(ctx), nxt, count))
        tables.append(table_from_triples(triples))
    if r.pos != len(body):
        raise ModelFormatError(f"{len(body) - r.pos} bytes of trailing garbage after tables")
    try:
        return NgramModel(
            order=order, discount=discount, vocab=tuple(vocab), counts=tuple(tables)
        )
    except (DomainError, VocabularyError) as exc:
        raise ModelFormatError(f"model content is invalid: {exc}") from exc


def save_model(model: NgramModel, path: str | Path) -> None:
    Path(path).write_bytes(serialize_model(model))


def load_model(path: str | Path) -> NgramModel:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise ModelFormatError(f"cannot read model file {path}: {exc}") from exc
    return deserialize_model(data)
