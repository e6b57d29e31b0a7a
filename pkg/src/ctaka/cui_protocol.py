"""Cui et al. pairing-free certificateless key agreement.

Full private key is ``s_i = x_i + d_i`` with ``d_i = s * H1(ID_i)``; the
implicit public key ``X_i + H1(ID_i) * P_pub`` therefore equals ``s_i * G``.

Per-session secrets::

    K1 = (t + s_i) * (T_peer + X_peer + H1(ID_peer) * P_pub)
    K2 = s_i * (X_peer + H1(ID_peer) * P_pub)
    SK = H(ID_init, ID_resp, T_init, T_resp, K1, K2)

Optional key confirmation (off by default) binds SK to the observed
transcript with a direction-tagged hash.
"""

from __future__ import annotations

import hmac
from dataclasses import dataclass

from .curve_math import (
    CurveParams,
    Point,
    get_profile,
    point_add,
    random_scalar,
    scalar_mul,
    validate_point,
)
from .errors import DegeneratePoint, DegenerateScalar
from .hash_encoding import CONFIRM, CUI_H1, CUI_SK, encode_message_fields, hash_to_scalar, kdf_session_key
from .rng import SeededRng

INITIATOR = "initiator"
RESPONDER = "responder"
ROLES = (INITIATOR, RESPONDER)
_ROLE_BYTE = {INITIATOR: b"\x01", RESPONDER: b"\x02"}


@dataclass(frozen=True)
class CuiParams:
    curve: CurveParams
    P_pub: Point


@dataclass(frozen=True)
class CuiKgcState:
    s: int


@dataclass(frozen=True)
class CuiUserKeys:
    ID: bytes
    x: int
    d: int
    s_i: int
    X: Point


@dataclass(frozen=True)
class CuiEphemeral:
    t: int
    T: Point


@dataclass(frozen=True)
class CuiMessage:
    ID: bytes
    X: Point
    T: Point

    def encode(self, params: CuiParams) -> bytes:
        return encode_message_fields([self.ID, self.X, self.T], params.curve)


@dataclass(frozen=True)
class CuiSessionSecrets:
    K1: Point
    K2: Point
    SK: bytes


def h1(ID: bytes, params: CuiParams) -> int:
    return hash_to_scalar(CUI_H1, [ID], params.curve.n)


def implicit_public_key(ID: bytes, X: Point, params: CuiParams) -> Point:
    """X + H1(ID) * P_pub, computable by anyone."""
    return point_add(X, scalar_mul(h1(ID, params), params.P_pub, params.curve), params.curve)


def cui_setup(profile: str | CurveParams, rng: SeededRng) -> tuple[CuiParams, CuiKgcState]:
    curve = get_profile(profile) if isinstance(profile, str) else profile
    s = random_scalar(rng, curve.n)
    return CuiParams(curve, scalar_mul(s, curve.G, curve)), CuiKgcState(s)


def cui_extract_partial(kgc: CuiKgcState, ID: bytes, params: CuiParams) -> int:
    # product of two nonzero residues mod a prime is nonzero
    return kgc.s * h1(ID, params) % params.curve.n


def cui_gen_user(params: CuiParams, ID: bytes, d: int, rng: SeededRng) -> CuiUserKeys:
    n = params.curve.n
    if not 1 <= d < n:
        raise DegenerateScalar("partial private key out of range")
    while True:
        x = random_scalar(rng, n)
        s_i = (x + d) % n
        if s_i:
            break
    return CuiUserKeys(ID, x, d, s_i, scalar_mul(x, params.curve.G, params.curve))


def cui_initiate(user: CuiUserKeys, params: CuiParams, rng: SeededRng) -> tuple[CuiEphemeral, CuiMessage]:
    n = params.curve.n
    while True:
        t = random_scalar(rng, n)
        if (t + user.s_i) % n:
            break
    T = scalar_mul(t, params.curve.G, params.curve)
    return CuiEphemeral(t, T), CuiMessage(user.ID, user.X, T)


def cui_derive(
    user: CuiUserKeys,
    eph: CuiEphemeral,
    peer: CuiMessage,
    role: str,
    params: CuiParams,
) -> CuiSessionSecrets:
    if role not in ROLES:
        raise ValueError(f"unknown role {role!r}")
    curve = params.curve
    validate_point(peer.X, curve)
    validate_point(peer.T, curve)
    n = curve.n
    k = (eph.t + user.s_i) % n
    if k == 0:
        raise DegenerateScalar("t + s_i is zero mod n")
    static = implicit_public_key(peer.ID, peer.X, params)
    if static.is_identity:
        raise DegeneratePoint("peer implicit public key is the identity")
    combined = point_add(peer.T, static, curve)
    if combined.is_identity:
        raise DegeneratePoint("peer ephemeral cancels its implicit public key")
    K1 = scalar_mul(k, combined, curve)
    K2 = scalar_mul(user.s_i, static, curve)
    if role == INITIATOR:
        ids, Ts = (user.ID, peer.ID), (eph.T, peer.T)
    else:
        ids, Ts = (peer.ID, user.ID), (peer.T, eph.T)
    SK = kdf_session_key(CUI_SK, [*ids, *Ts, K1, K2], curve)
    return CuiSessionSecrets(K1, K2, SK)


def cui_transcript(init_msg: CuiMessage, resp_msg: CuiMessage, params: CuiParams) -> bytes:
    """Confirmation transcript: both messages as this party observed them."""
    return encode_message_fields([init_msg.encode(params), resp_msg.encode(params)])


def cui_confirm_tag(SK: bytes, transcript: bytes, role: str) -> bytes:
    if role not in ROLES:
        raise ValueError(f"unknown role {role!r}")
    return kdf_session_key(CONFIRM, [_ROLE_BYTE[role], SK, transcript])


def cui_verify_tag(SK: bytes, transcript: bytes, role: str, tag: bytes) -> bool:
    return hmac.compare_digest(cui_confirm_tag(SK, transcript, role), tag)
