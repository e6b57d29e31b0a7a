"""Deng et al. certificateless key agreement for smart-grid endpoints.

Registration: the user picks ``t`` and publishes ``T = t*P``; the KGC signs
with ``R = r*P``, ``h = H1(ID, T, R)``, ``d = r + h*x``.  Agreement uses an
ephemeral ``a`` with ``M = a*P`` and::

    l = H2(ID_i, ID_j, T_i, T_j, R_i, R_j, M_i, M_j)
    K = (l*a_i + t_i + d_i) * (l*M_j + T_j + R_j + h_j*P_pub)
    SK = H3(ID_i, ID_j, T_i, T_j, R_i, R_j, M_i, M_j, K)

Field order is always initiator first.  ``T`` is not carried in the agreement
messages; peers read it from a published directory record.
"""

from __future__ import annotations

from dataclasses import dataclass

from .curve_math import (
    CurveParams,
    Point,
    get_profile,
    point_sum,
    random_scalar,
    scalar_mul,
    validate_point,
)
from .errors import DegeneratePoint, DegenerateScalar
from .hash_encoding import DENG_H1, DENG_H2, DENG_SK, encode_message_fields, hash_to_scalar, kdf_session_key
from .rng import SeededRng
from .cui_protocol import INITIATOR, ROLES


@dataclass(frozen=True)
class DengParams:
    curve: CurveParams
    P_pub: Point


@dataclass(frozen=True)
class DengKgcState:
    x: int


@dataclass(frozen=True)
class DengRequest:
    ID: bytes
    T: Point


@dataclass(frozen=True)
class DengRegistration:
    ID: bytes
    t: int
    T: Point
    r_issued: int
    R: Point
    h: int
    d: int


@dataclass(frozen=True)
class DengEphemeral:
    a: int
    M: Point


@dataclass(frozen=True)
class DengMessage:
    R: Point
    M: Point

    def encode(self, params: DengParams) -> bytes:
        return encode_message_fields([self.R, self.M], params.curve)


@dataclass(frozen=True)
class DengPublicRecord:
    ID: bytes
    T: Point


@dataclass(frozen=True)
class DengSessionSecrets:
    l: int
    K: Point
    SK: bytes


def h1(ID: bytes, T: Point, R: Point, params: DengParams) -> int:
    return hash_to_scalar(DENG_H1, [ID, T, R], params.curve.n, params.curve)


def deng_setup(profile: str | CurveParams, rng: SeededRng) -> tuple[DengParams, DengKgcState]:
    curve = get_profile(profile) if isinstance(profile, str) else profile
    x = random_scalar(rng, curve.n)
    return DengParams(curve, scalar_mul(x, curve.G, curve)), DengKgcState(x)


def deng_register_request(ID: bytes, params: DengParams, rng: SeededRng) -> tuple[int, Point, DengRequest]:
    t = random_scalar(rng, params.curve.n)
    T = scalar_mul(t, params.curve.G, params.curve)
    return t, T, DengRequest(ID, T)


def deng_issue_partial_full(
    kgc: DengKgcState, request: DengRequest, params: DengParams, rng: SeededRng
) -> tuple[int, int, Point]:
    """Like :func:`deng_issue_partial` but also returns the KGC nonce r."""
    curve = params.curve
    validate_point(request.T, curve)
    while True:
        r = random_scalar(rng, curve.n)
        R = scalar_mul(r, curve.G, curve)
        d = (r + h1(request.ID, request.T, R, params) * kgc.x) % curve.n
        if d:
            return r, d, R


def deng_issue_partial(
    kgc: DengKgcState, request: DengRequest, params: DengParams, rng: SeededRng
) -> tuple[int, Point]:
    _, d, R = deng_issue_partial_full(kgc, request, params, rng)
    return d, R


def deng_validate_partial(params: DengParams, ID: bytes, T: Point, d: int, R: Point) -> bool:
    curve = params.curve
    try:
        validate_point(T, curve)
        validate_point(R, curve)
    except (DegeneratePoint, ValueError):
        return False
    h = h1(ID, T, R, params)
    lhs = scalar_mul(d, curve.G, curve)
    return lhs == point_sum([R, scalar_mul(h, params.P_pub, curve)], curve)


def deng_register(
    ID: bytes, kgc: DengKgcState, params: DengParams, user_rng: SeededRng, kgc_rng: SeededRng
) -> DengRegistration:
    """Full registration round: request, issuance over the secure channel."""
    t, T, req = deng_register_request(ID, params, user_rng)
    r, d, R = deng_issue_partial_full(kgc, req, params, kgc_rng)
    return DengRegistration(ID, t, T, r, R, h1(ID, T, R, params), d)


def deng_initiate(reg: DengRegistration, params: DengParams, rng: SeededRng) -> tuple[DengEphemeral, DengMessage]:
    a = random_scalar(rng, params.curve.n)
    M = scalar_mul(a, params.curve.G, params.curve)
    return DengEphemeral(a, M), DengMessage(reg.R, M)


def deng_agreement_hash(
    ids: tuple[bytes, bytes],
    Ts: tuple[Point, Point],
    Rs: tuple[Point, Point],
    Ms: tuple[Point, Point],
    params: DengParams,
) -> int:
    return hash_to_scalar(DENG_H2, [*ids, *Ts, *Rs, *Ms], params.curve.n, params.curve)


def deng_derive(
    me: DengRegistration,
    eph: DengEphemeral,
    peer_record: DengPublicRecord,
    peer_msg: DengMessage,
    role: str,
    params: DengParams,
) -> DengSessionSecrets:
    if role not in ROLES:
        raise ValueError(f"unknown role {role!r}")
    curve = params.curve
    n = curve.n
    validate_point(peer_msg.R, curve)
    validate_point(peer_msg.M, curve)
    validate_point(peer_record.T, curve)

    if role == INITIATOR:
        ids = (me.ID, peer_record.ID)
        Ts, Rs, Ms = (me.T, peer_record.T), (me.R, peer_msg.R), (eph.M, peer_msg.M)
    else:
        ids = (peer_record.ID, me.ID)
        Ts, Rs, Ms = (peer_record.T, me.T), (peer_msg.R, me.R), (peer_msg.M, eph.M)
    l = deng_agreement_hash(ids, Ts, Rs, Ms, params)

    k = (l * eph.a + me.t + me.d) % n
    if k == 0:
        raise DegenerateScalar("l*a + t + d is zero mod n")
    h_peer = h1(peer_record.ID, peer_record.T, peer_msg.R, params)
    base = point_sum(
        [
            scalar_mul(l, peer_msg.M, curve),
            peer_record.T,
            peer_msg.R,
            scalar_mul(h_peer, params.P_pub, curve),
        ],
        curve,
    )
    K = scalar_mul(k, base, curve)
    if K.is_identity:
        raise DegeneratePoint("agreed point is the identity")
    SK = kdf_session_key(DENG_SK, [*ids, *Ts, *Rs, *Ms, K], curve)
    return DengSessionSecrets(l, K, SK)


def deng_transcript(
    init_id: bytes, resp_id: bytes, init_msg: DengMessage, resp_msg: DengMessage, params: DengParams
) -> bytes:
    return encode_message_fields([init_id, resp_id, init_msg.encode(params), resp_msg.encode(params)])
