"""Canonical binary encoding: deterministic, length-prefixed, round-trippable.

Every hash and signature in the system is computed over canonical bytes, so
two logically identical values must always serialize to identical bytes.
The encoding is a tagged, length-prefixed format:

    N                                   none
    T / F                               booleans
    I <u32 len> <ascii decimal>         integers (arbitrary precision)
    B <u32 len> <raw bytes>             byte strings
    S <u32 len> <utf-8 bytes>           text strings
    L <u32 count> <item>...             lists
    M <u32 count> (<key str> <value>)...  maps, keys sorted, string keys only

Map keys are sorted by code point, which fixes the field order regardless of
insertion order.
"""

from __future__ import annotations

import struct
from typing import Any

_U32 = struct.Struct(">I")


class CanonicalError(ValueError):
    """Value cannot be canonically encoded or bytes cannot be decoded."""


def encode(value: Any) -> bytes:
    """Encode a value (None, bool, int, bytes, str, list, dict) to canonical bytes."""
    out = bytearray()
    _encode_into(out, value)
    return bytes(out)


def _encode_into(out: bytearray, value: Any) -> None:
    if value is None:
        out += b"N"
    elif value is True:
        out += b"T"
    elif value is False:
        out += b"F"
    elif isinstance(value, int):
        digits = str(value).encode("ascii")
        out += b"I"
        out += _U32.pack(len(digits))
        out += digits
    elif isinstance(value, bytes):
        out += b"B"
        out += _U32.pack(len(value))
        out += value
    elif isinstance(value, str):
        raw = value.encode("utf-8")
        out += b"S"
        out += _U32.pack(len(raw))
        out += raw
    elif isinstance(value, (list, tuple)):
        out += b"L"
        out += _U32.pack(len(value))
        for item in value:
            _encode_into(out, item)
    elif isinstance(value, dict):
        keys = list(value.keys())
        for key in keys:
            if not isinstance(key, str):
                raise CanonicalError(f"map keys must be str, got {type(key).__name__}")
        keys.sort()
        out += b"M"
        out += _U32.pack(len(keys))
        for key in keys:
            raw = key.encode("utf-8")
            out += _U32.pack(len(raw))
            out += raw
            _encode_into(out, value[key])
    else:
        raise CanonicalError(f"type {type(value).__name__} is not canonically encodable")


def decode(data: bytes) -> Any:
    """Decode canonical bytes back to a value; rejects trailing garbage."""
    value, offset = _decode_at(data, 0)
    if offset != len(data):
        raise CanonicalError(f"{len(data) - offset} trailing bytes after canonical value")
    return value


def _read_u32(data: bytes, offset: int) -> tuple[int, int]:
    if offset + 4 > len(data):
        raise CanonicalError("truncated length prefix")
    return _U32.unpack_from(data, offset)[0], offset + 4


def _read_raw(data: bytes, offset: int, length: int) -> tuple[bytes, int]:
    if offset + length > len(data):
        raise CanonicalError("truncated payload")
    return data[offset : offset + length], offset + length


def _decode_at(data: bytes, offset: int) -> tuple[Any, int]:
    if offset >= len(data):
        raise CanonicalError("unexpected end of input")
    tag = data[offset : offset + 1]
    offset += 1
    if tag == b"N":
        return None, offset
    if tag == b"T":
        return True, offset
    if tag == b"F":
        return False, offset
    if tag == b"I":
        length, offset = _read_u32(data, offset)
        raw, offset = _read_raw(data, offset, length)
        try:
            text = raw.decode("ascii")
            value = int(text)
        except (UnicodeDecodeError, ValueError) as exc:
            raise CanonicalError("malformed integer") from exc
        if str(value).encode("ascii") != raw:
            raise CanonicalError("non-canonical integer representation")
        return value, offset
    if tag == b"B":
        length, offset = _read_u32(data, offset)
        raw, offset = _read_raw(data, offset, length)
        return raw, offset
    if tag == b"S":
        length, offset = _read_u32(data, offset)
        raw, offset = _read_raw(data, offset, length)
        try:
            return raw.decode("utf-8"), offset
        except UnicodeDecodeError as exc:
            raise CanonicalError("malformed utf-8 string") from exc
    if tag == b"L":
        count, offset = _read_u32(data, offset)
        items = []
        for _ in range(count):
            item, offset = _decode_at(data, offset)
            items.append(item)
        return items, offset
    if tag == b"M":
        count, offset = _read_u32(data, offset)
        result: dict[str, Any] = {}
        prev_key: str | None = None
        for _ in range(count):
            klen, offset = _read_u32(data, offset)
            kraw, offset = _read_raw(data, offset, klen)
            try:
                key = kraw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise CanonicalError("malformed map key") from exc
            if prev_key is not None and key <= prev_key:
                raise CanonicalError("map keys out of canonical order")
            prev_key = key
            value, offset = _decode_at(data, offset)
            result[key] = value
        return result, offset
    raise CanonicalError(f"unknown tag {tag!r}")
