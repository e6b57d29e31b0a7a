import hashlib
import itertools

import pytest
from hypothesis import given, settings, strategies as st

from ctaka.curve_math import IDENTITY, STANDARD, TOY, decode_point, scalar_mul
from ctaka.errors import UnknownDomain
from ctaka.hash_encoding import (
    CONFIRM,
    CUI_H1,
    CUI_SK,
    DOMAIN_TAGS,
    decode_fields,
    encode_message_fields,
    hash_to_scalar,
    kdf_session_key,
)


def _raw(tag: bytes, *fields: bytes) -> bytes:
    body = b"".join(len(f).to_bytes(4, "big") + f for f in fields)
    return hashlib.sha256(tag + body).digest()


def test_hash_to_scalar_reference_value():
    # reference: sha256("CUI-H1" || 00000005 || "Alice") mod 101, computed by hand with hashlib
    assert hash_to_scalar(CUI_H1, ["Alice"], TOY.n) == 62
    assert int.from_bytes(_raw(b"CUI-H1", b"Alice"), "big") % TOY.n == 62


def test_hash_to_scalar_deterministic_and_in_range():
    for i in range(500):
        v = hash_to_scalar(CUI_H1, [f"id-{i}"], TOY.n)
        assert v == hash_to_scalar(CUI_H1, [f"id-{i}"], TOY.n)
        assert 1 <= v <= TOY.n - 1


def test_unknown_domain():
    with pytest.raises(UnknownDomain):
        hash_to_scalar("NOPE", [b"x"], TOY.n)
    with pytest.raises(UnknownDomain):
        kdf_session_key("NOPE", [])


def test_zero_reduction_is_rehashed_with_counter():
    # search for payloads whose first reduction is exactly zero
    zeros = []
    for i in itertools.count():
        payload = f"boundary-{i}".encode()
        if int.from_bytes(_raw(b"CUI-H1", payload), "big") % TOY.n == 0:
            zeros.append(payload)
            if len(zeros) == 5:
                break
    for payload in zeros:
        v = hash_to_scalar(CUI_H1, [payload], TOY.n)
        assert v != 0
        body = len(payload).to_bytes(4, "big") + payload
        expected = int.from_bytes(hashlib.sha256(b"CUI-H1" + body + b"\x01").digest(), "big") % TOY.n
        if expected:
            assert v == expected


def test_hash_to_scalar_tiny_modulus_never_zero():
    # modulus 2: half of all first reductions are zero
    assert all(hash_to_scalar(CUI_H1, [str(i)], 2) == 1 for i in range(300))


def test_kdf_examples():
    assert kdf_session_key(CUI_SK, [b"a", b"b"]) == kdf_session_key(CUI_SK, [b"a", b"b"])
    assert kdf_session_key(CUI_SK, []) == hashlib.sha256(b"CUI-SK").digest()
    assert len(kdf_session_key(CUI_SK, [b"x"])) == 32


def test_kdf_single_bit_flip_changes_key():
    fields = [b"alice", b"bob", bytes(range(33))]
    base = kdf_session_key(CUI_SK, fields)
    for i, f in enumerate(fields):
        for bit in range(len(f) * 8):
            flipped = bytearray(f)
            flipped[bit // 8] ^= 1 << (bit % 8)
            mutated = list(fields)
            mutated[i] = bytes(flipped)
            assert kdf_session_key(CUI_SK, mutated) != base


def test_domain_separation():
    tags = sorted(DOMAIN_TAGS)
    for payload in ([b""], [b"alice"], [b"x" * 100]):
        assert len({kdf_session_key(t, payload) for t in tags}) == len(tags)
        assert kdf_session_key(CUI_SK, payload) != kdf_session_key(CONFIRM, payload)


def test_encoding_examples():
    assert encode_message_fields(["A"]) != encode_message_fields(["A", ""])
    enc = encode_message_fields([IDENTITY], TOY)
    assert enc == b"\x00\x00\x00\x02" + b"\x00\x00"
    P = scalar_mul(12345, STANDARD.G, STANDARD)
    (raw,) = decode_fields(encode_message_fields([P], STANDARD))
    assert decode_point(raw, STANDARD) == P


def test_encoding_requires_params_for_points():
    with pytest.raises(TypeError):
        encode_message_fields([TOY.G])


def test_encoding_injective_sample():
    import random

    rnd = random.Random(3)
    seen = {}
    while len(seen) < 10_000:
        tup = tuple(bytes(rnd.randrange(256) for _ in range(rnd.randrange(4))) for _ in range(rnd.randrange(4)))
        seen[tup] = encode_message_fields(tup)
    assert len(set(seen.values())) == len(seen)


@settings(max_examples=200)
@given(st.lists(st.binary(max_size=20), max_size=6))
def test_decode_inverts_encode(fields):
    assert decode_fields(encode_message_fields(fields)) == fields
