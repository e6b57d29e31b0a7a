"""Prime-field arithmetic and short Weierstrass group operations.

Curve: y^2 = x^3 + a*x + b over GF(p).  Points are affine; the group
identity is the sentinel ``IDENTITY``.  Scalars are plain ints reduced
modulo the generator order n.

Two protocol profiles are provided:

* ``TOY``      y^2 = x^3 + 2x + 14 over GF(97), prime order 101 (cofactor 1),
               small enough for exhaustive enumeration;
* ``STANDARD`` NIST P-256 / secp256r1.

``CURVE_97_2_3`` (y^2 = x^3 + 2x + 3 over GF(97), 100 points) is kept as an
arithmetic fixture; its base point (3, 6) has order 5.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from sympy import isprime
from sympy.ntheory import sqrt_mod

from .errors import (
    DegeneratePoint,
    DivisionByZero,
    InvalidPoint,
    ProfileTooLarge,
)
from .rng import SeededRng

TOY_LIMIT = 2**16


@dataclass(frozen=True)
class Point:
    x: Optional[int]
    y: Optional[int]

    @property
    def is_identity(self) -> bool:
        return self.x is None

    def __repr__(self) -> str:
        if self.is_identity:
            return "Point(identity)"
        return f"Point({self.x:#x}, {self.y:#x})"


IDENTITY = Point(None, None)


@dataclass(frozen=True)
class CurveParams:
    """Domain parameters; validated on construction."""

    p: int
    a: int
    b: int
    G: Point
    n: int
    profile_id: str

    def __post_init__(self) -> None:
        if not isprime(self.p):
            raise ValueError("field modulus is not prime")
        if not (0 <= self.a < self.p and 0 <= self.b < self.p):
            raise ValueError("curve coefficients must lie in [0, p)")
        if (4 * self.a**3 + 27 * self.b**2) % self.p == 0:
            raise ValueError("singular curve")
        if not isprime(self.n):
            raise ValueError("generator order is not prime")
        if self.G.is_identity or not on_curve(self.G, self):
            raise ValueError("generator is not a curve point")
        if not scalar_mul(self.n, self.G, self).is_identity:
            raise ValueError("n*G is not the identity")

    @property
    def field_bytes(self) -> int:
        return (self.p.bit_length() + 7) // 8

    @property
    def scalar_bytes(self) -> int:
        return (self.n.bit_length() + 7) // 8


def fe_inv(a: int, p: int) -> int:
    """Inverse of ``a`` modulo prime ``p``."""
    a %= p
    if a == 0:
        raise DivisionByZero("zero has no inverse mod p")
    return pow(a, -1, p)


def on_curve(P: Point, params: CurveParams) -> bool:
    if P.is_identity:
        return True
    p = params.p
    if not (0 <= P.x < p and 0 <= P.y < p):
        return False
    return (P.y * P.y - (P.x * P.x * P.x + params.a * P.x + params.b)) % p == 0


def neg(P: Point, params: CurveParams) -> Point:
    if P.is_identity:
        return P
    return Point(P.x, (-P.y) % params.p)


def _add(P: Point, Q: Point, params: CurveParams) -> Point:
    # unchecked chord-tangent law
    if P.is_identity:
        return Q
    if Q.is_identity:
        return P
    p = params.p
    if P.x == Q.x:
        if (P.y + Q.y) % p == 0:
            return IDENTITY
        lam = (3 * P.x * P.x + params.a) * fe_inv(2 * P.y, p) % p
    else:
        lam = (Q.y - P.y) * fe_inv(Q.x - P.x, p) % p
    x = (lam * lam - P.x - Q.x) % p
    y = (lam * (P.x - x) - P.y) % p
    return Point(x, y)


def point_add(P: Point, Q: Point, params: CurveParams) -> Point:
    """Group sum of two curve points."""
    if not on_curve(P, params) or not on_curve(Q, params):
        raise InvalidPoint("operand is not on the curve")
    return _add(P, Q, params)


def _jdouble(X: int, Y: int, Z: int, p: int, a: int) -> tuple[int, int, int]:
    if Z == 0 or Y == 0:
        return 1, 1, 0
    YY = Y * Y % p
    S = 4 * X * YY % p
    ZZ = Z * Z % p
    M = (3 * X * X + a * ZZ * ZZ) % p
    X3 = (M * M - 2 * S) % p
    return X3, (M * (S - X3) - 8 * YY * YY) % p, 2 * Y * Z % p


def _jadd_affine(X1: int, Y1: int, Z1: int, x2: int, y2: int, p: int, a: int) -> tuple[int, int, int]:
    if Z1 == 0:
        return x2, y2, 1
    Z1Z1 = Z1 * Z1 % p
    H = (x2 * Z1Z1 - X1) % p
    r = (y2 * Z1 * Z1Z1 - Y1) % p
    if H == 0:
        if r == 0:
            return _jdouble(X1, Y1, Z1, p, a)
        return 1, 1, 0
    HH = H * H % p
    HHH = H * HH % p
    V = X1 * HH % p
    X3 = (r * r - HHH - 2 * V) % p
    return X3, (r * (V - X3) - Y1 * HHH) % p, Z1 * H % p


def scalar_mul(k: int, P: Point, params: CurveParams) -> Point:
    """k*P by left-to-right double-and-add (not constant time).

    The ladder runs in Jacobian coordinates and converts back to affine once;
    inputs and outputs are affine.
    """
    if not on_curve(P, params):
        raise InvalidPoint("operand is not on the curve")
    if k < 0:
        return scalar_mul(-k, neg(P, params), params)
    if k == 0 or P.is_identity:
        return IDENTITY
    p, a = params.p, params.a
    X, Y, Z = 1, 1, 0
    for bit in bin(k)[2:]:
        X, Y, Z = _jdouble(X, Y, Z, p, a)
        if bit == "1":
            X, Y, Z = _jadd_affine(X, Y, Z, P.x, P.y, p, a)
    if Z == 0:
        return IDENTITY
    zi = fe_inv(Z, p)
    zi2 = zi * zi % p
    return Point(X * zi2 % p, Y * zi2 * zi % p)


def point_sum(points, params: CurveParams) -> Point:
    R = IDENTITY
    for P in points:
        R = point_add(R, P, params)
    return R


def validate_point(P: Point, params: CurveParams) -> Point:
    """Reception check applied to every on-wire point."""
    if P.is_identity:
        raise DegeneratePoint("identity point received")
    if not on_curve(P, params):
        raise InvalidPoint(f"{P!r} is not on the curve")
    return P


def enumerate_curve(params: CurveParams) -> tuple[int, list[Point]]:
    """Brute-force every point of a small curve (identity included)."""
    p = params.p
    if p >= TOY_LIMIT:
        raise ProfileTooLarge(f"refusing to enumerate a {p.bit_length()}-bit field")
    roots: dict[int, list[int]] = {}
    for y in range(p):
        roots.setdefault(y * y % p, []).append(y)
    points = [IDENTITY]
    for x in range(p):
        rhs = (x * x * x + params.a * x + params.b) % p
        points.extend(Point(x, y) for y in roots.get(rhs, ()))
    order = len(points)
    lo = p + 1 - 2 * math.sqrt(p)
    hi = p + 1 + 2 * math.sqrt(p)
    assert lo <= order <= hi, "point count violates the Hasse bound"
    return order, points


def hasse_interval(p: int) -> tuple[int, int]:
    r = math.sqrt(p)
    return math.ceil(p + 1 - 2 * r), math.floor(p + 1 + 2 * r)


def random_scalar(rng: SeededRng, n: int) -> int:
    """Uniform nonzero scalar in [1, n-1]."""
    return rng.randrange(1, n)


# -- serialization ---------------------------------------------------------


def encode_point(P: Point, params: CurveParams) -> bytes:
    width = params.field_bytes
    if P.is_identity:
        return b"\x00" + bytes(width)
    return bytes([2 + (P.y & 1)]) + P.x.to_bytes(width, "big")


def decode_point(data: bytes, params: CurveParams) -> Point:
    width = params.field_bytes
    if len(data) != 1 + width:
        raise InvalidPoint("bad point encoding length")
    prefix, x = data[0], int.from_bytes(data[1:], "big")
    if prefix == 0:
        if x:
            raise InvalidPoint("identity encoding carries a nonzero x")
        return IDENTITY
    if prefix not in (2, 3) or x >= params.p:
        raise InvalidPoint("bad point encoding")
    rhs = (x * x * x + params.a * x + params.b) % params.p
    y = sqrt_mod(rhs, params.p)
    if y is None:
        raise InvalidPoint("x is not the abscissa of a curve point")
    if (y & 1) != (prefix & 1):
        y = params.p - y
    return Point(x, y % params.p)


def encode_scalar(k: int, params: CurveParams) -> bytes:
    return (k % params.n).to_bytes(params.scalar_bytes, "big")


# -- profiles --------------------------------------------------------------

CURVE_97_2_3 = CurveParams(p=97, a=2, b=3, G=Point(3, 6), n=5, profile_id="fixture-97")

# generator: first non-identity point in enumeration order
TOY = CurveParams(p=97, a=2, b=14, G=Point(3, 12), n=101, profile_id="toy")

_P256_P = 0xFFFFFFFF00000001000000000000000000000000FFFFFFFFFFFFFFFFFFFFFFFF
STANDARD = CurveParams(
    p=_P256_P,
    a=_P256_P - 3,
    b=0x5AC635D8AA3A93E7B3EBBD55769886BC651D06B0CC53B0F63BCE3C3E27D2604B,
    G=Point(
        0x6B17D1F2E12C4247F8BCE6E563A440F277037D812DEB33A0F4A13945D898C296,
        0x4FE342E2FE1A7F9B8EE7EB4A7C0F9E162BCE33576B315ECECBB6406837BF51F5,
    ),
    n=0xFFFFFFFF00000000FFFFFFFFFFFFFFFFBCE6FAADA7179E84F3B9CAC2FC632551,
    profile_id="standard",
)

PROFILES = {"toy": TOY, "standard": STANDARD}


def get_profile(name: str) -> CurveParams:
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown curve profile {name!r}") from None
