"""Canonical JSON: one byte sequence per value.

Keys are sorted, separators are compact, non-ASCII is emitted raw UTF-8
and floats are printed with 9 significant digits. Nine digits are coarse
enough that parsing the output and serializing again reproduces the exact
same bytes (a float within half an ulp of a 9-digit decimal rounds back
to it), which is what makes responses comparable as byte strings.
"""

from __future__ import annotations

import json
import math
from typing import Any

from .errors import DomainError


def _format_float(value: float) -> str:
    if math.isnan(value) or math.isinf(value):
        raise DomainError(f"canonical JSON cannot represent {value!r}")
    if value == 0.0:
        return "0"  # avoid "-0", which would not survive a round trip
    return "%.9g" % value


def _write(value: Any, out: list[str]) -> None:
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(_format_float(value))
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _write(item, out)
        out.append("]")
    elif isinstance(value, dict):
        out.append("{")
        for i, key in enumerate(sorted(value)):
            if not isinstance(key, str):
                raise DomainError(f"canonical JSON keys must be strings, got {key!r}")
            if i:
                out.append(",")
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(":")
            _write(value[key], out)
        out.append("}")
    else:
        raise DomainError(f"cannot canonicalize {type(value).__name__}")


def dumps(value: Any) -> str:
    out: list[str] = []
    _write(value, out)
    return "".join(out)


def dump_bytes(value: Any) -> bytes:
    return dumps(value).encode("utf-8")
