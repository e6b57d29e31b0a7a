"""Byte encodings and domain-separated hashing.

All logical hash functions share SHA-256 and differ only by an ASCII domain
tag, which is always the first absorbed bytes.  Field lists are encoded as
``len(4, big-endian) || bytes`` records, which keeps the encoding injective.
"""

from __future__ import annotations

import hashlib
from typing import Iterable, Sequence, Union

from .curve_math import CurveParams, Point, decode_point, encode_point, encode_scalar
from .errors import UnknownDomain

DIGEST_ALGORITHM = "sha256"

# identity hash (Cui H1) and session-key hash (Cui H2)
CUI_H1 = "CUI-H1"
CUI_SK = "CUI-SK"
# registration hash, agreement coefficient hash, session-key hash (Deng H1..H3)
DENG_H1 = "DENG-H1"
DENG_H2 = "DENG-H2"
DENG_SK = "DENG-SK"
CONFIRM = "CONFIRM"
DIGEST = "DIGEST"

DOMAIN_TAGS = frozenset({CUI_H1, CUI_SK, DENG_H1, DENG_H2, DENG_SK, CONFIRM, DIGEST})

Field = Union[bytes, str, int, Point]


def _check_tag(tag: str) -> bytes:
    if tag not in DOMAIN_TAGS:
        raise UnknownDomain(tag)
    return tag.encode("ascii")


def field_bytes(value: Field, params: CurveParams | None = None) -> bytes:
    """Canonical byte form of a single field value."""
    if isinstance(value, Point):
        if params is None:
            raise TypeError("encoding a point needs curve parameters")
        return encode_point(value, params)
    if isinstance(value, (bytes, bytearray)):
        return bytes(value)
    if isinstance(value, str):
        return value.encode("utf-8")
    if isinstance(value, bool):
        raise TypeError("booleans are not encodable fields")
    if isinstance(value, int):
        if params is None:
            raise TypeError("encoding a scalar needs curve parameters")
        return encode_scalar(value, params)
    raise TypeError(f"cannot encode {type(value).__name__}")


def encode_message_fields(values: Iterable[Field], params: CurveParams | None = None) -> bytes:
    out = bytearray()
    for v in values:
        b = field_bytes(v, params)
        out += len(b).to_bytes(4, "big")
        out += b
    return bytes(out)


def decode_fields(data: bytes) -> list[bytes]:
    """Split a length-prefixed encoding back into raw fields."""
    fields, i = [], 0
    while i < len(data):
        if i + 4 > len(data):
            raise ValueError("truncated length prefix")
        n = int.from_bytes(data[i : i + 4], "big")
        i += 4
        if i + n > len(data):
            raise ValueError("truncated field")
        fields.append(data[i : i + n])
        i += n
    return fields


def decode_point_field(data: bytes, params: CurveParams) -> Point:
    return decode_point(data, params)


def _digest(tag: str, encoded: bytes) -> bytes:
    h = hashlib.new(DIGEST_ALGORITHM)
    h.update(_check_tag(tag))
    h.update(encoded)
    return h.digest()


def hash_to_scalar(tag: str, fields: Sequence[Field], n: int, params: CurveParams | None = None) -> int:
    """Hash into [1, n-1]; a zero reduction is retried with a counter byte."""
    encoded = encode_message_fields(fields, params)
    v = int.from_bytes(_digest(tag, encoded), "big") % n
    counter = 0
    while v == 0:
        counter += 1
        if counter > 255:
            raise RuntimeError("no nonzero reduction within 255 retries")
        v = int.from_bytes(_digest(tag, encoded + bytes([counter])), "big") % n
    return v


def kdf_session_key(tag: str, fields: Sequence[Field], params: CurveParams | None = None) -> bytes:
    return _digest(tag, encode_message_fields(fields, params))


def short_digest(data: bytes) -> str:
    """8-byte fingerprint used in transcripts instead of raw key material."""
    return _digest(DIGEST, data)[:8].hex()
