import random

import pytest
from cryptography.hazmat.primitives.asymmetric import ec
from hypothesis import given, settings, strategies as st

from ctaka.curve_math import (
    CURVE_97_2_3,
    IDENTITY,
    STANDARD,
    TOY,
    CurveParams,
    Point,
    decode_point,
    encode_point,
    encode_scalar,
    enumerate_curve,
    fe_inv,
    hasse_interval,
    point_add,
    random_scalar,
    scalar_mul,
    validate_point,
)
from ctaka.errors import DegeneratePoint, DivisionByZero, InvalidPoint, ProfileTooLarge
from ctaka.rng import SeededRng

F97 = CURVE_97_2_3


@pytest.fixture(scope="module")
def toy_points():
    return enumerate_curve(TOY)[1]


# -- field ------------------------------------------------------------------


def test_fe_inv_examples():
    assert fe_inv(1, 97) == 1
    assert fe_inv(12, 97) == 89
    assert 12 * 89 % 97 == 1
    with pytest.raises(DivisionByZero):
        fe_inv(0, 97)


def test_fe_inv_exhaustive_against_brute_force():
    for a in range(1, 97):
        assert fe_inv(a, 97) == next(b for b in range(97) if a * b % 97 == 1)


# -- group law, fixed examples -----------------------------------------------


def test_point_add_examples():
    P = Point(3, 6)
    assert point_add(P, IDENTITY, F97) == P
    assert point_add(P, Point(3, 91), F97) == IDENTITY
    assert point_add(P, P, F97) == Point(80, 10)
    assert (10 * 10 - (80**3 + 2 * 80 + 3)) % 97 == 0


def test_point_add_rejects_off_curve():
    with pytest.raises(InvalidPoint):
        point_add(Point(3, 7), Point(3, 6), F97)


def test_scalar_mul_examples():
    P = Point(3, 6)
    assert scalar_mul(0, P, F97) == IDENTITY
    assert scalar_mul(1, P, F97) == P
    assert scalar_mul(2, P, F97) == point_add(P, P, F97) == Point(80, 10)
    assert scalar_mul(5, P, F97) == IDENTITY


def test_validate_point_examples():
    assert validate_point(Point(3, 6), F97) == Point(3, 6)
    with pytest.raises(InvalidPoint):
        validate_point(Point(3, 7), F97)
    with pytest.raises(DegeneratePoint):
        validate_point(IDENTITY, F97)


# -- enumeration oracle ------------------------------------------------------


def test_enumeration_hasse_and_fixture_curve():
    order, points = enumerate_curve(F97)
    lo, hi = hasse_interval(97)
    assert (lo, hi) == (79, 117)
    assert lo <= order <= hi
    assert order == 100
    assert all(validate_point(P, F97) for P in points[1:])
    assert scalar_mul(order, F97.G, F97) == IDENTITY


def test_toy_profile_is_cofactor_one(toy_points):
    order = len(toy_points)
    assert order == TOY.n == 101
    assert toy_points[1] == TOY.G
    assert scalar_mul(order, TOY.G, TOY) == IDENTITY


def test_enumerate_refuses_standard():
    with pytest.raises(ProfileTooLarge):
        enumerate_curve(STANDARD)


def test_validate_point_matches_enumeration(toy_points):
    on = set(toy_points[1:])
    for x in range(TOY.p):
        for y in range(TOY.p):
            P = Point(x, y)
            if P in on:
                validate_point(P, TOY)
            else:
                with pytest.raises(InvalidPoint):
                    validate_point(P, TOY)


def test_scalar_mul_full_sweep_matches_iterated_addition():
    for curve in (TOY, F97):
        acc = IDENTITY
        for k in range(curve.n):
            assert scalar_mul(k, curve.G, curve) == acc
            acc = point_add(acc, curve.G, curve)
        assert acc == IDENTITY


def test_group_laws_on_toy(toy_points):
    for P in toy_points:
        assert point_add(P, IDENTITY, TOY) == P
        neg = IDENTITY if P.is_identity else Point(P.x, (-P.y) % TOY.p)
        assert point_add(P, neg, TOY) == IDENTITY
        for Q in toy_points:
            assert point_add(P, Q, TOY) == point_add(Q, P, TOY)
    rnd = random.Random(7)
    for _ in range(2000):
        P, Q, R = (rnd.choice(toy_points) for _ in range(3))
        assert point_add(point_add(P, Q, TOY), R, TOY) == point_add(P, point_add(Q, R, TOY), TOY)


@pytest.mark.parametrize("curve", [TOY, STANDARD], ids=["toy", "standard"])
def test_distributivity(curve):
    rng = SeededRng(99, "distributivity")
    for _ in range(100):
        k1, k2 = rng.randbelow(curve.n), rng.randbelow(curve.n)
        lhs = scalar_mul((k1 + k2) % curve.n, curve.G, curve)
        rhs = point_add(scalar_mul(k1, curve.G, curve), scalar_mul(k2, curve.G, curve), curve)
        assert lhs == rhs


# -- standard profile against an independent implementation -------------------


def test_standard_profile_constants():
    assert scalar_mul(STANDARD.n, STANDARD.G, STANDARD) == IDENTITY
    assert STANDARD.field_bytes == 32


@pytest.mark.parametrize("k", [1, 2, 3, 0xDEADBEEF, STANDARD.n - 1, 2**255 + 12345])
def test_scalar_mul_matches_openssl_p256(k):
    pub = ec.derive_private_key(k, ec.SECP256R1()).public_key().public_numbers()
    assert scalar_mul(k, STANDARD.G, STANDARD) == Point(pub.x, pub.y)


def test_curve_params_validation():
    with pytest.raises(ValueError):
        CurveParams(p=97, a=2, b=3, G=Point(3, 7), n=5, profile_id="bad")
    with pytest.raises(ValueError):
        CurveParams(p=97, a=2, b=3, G=Point(3, 6), n=7, profile_id="bad")
    with pytest.raises(ValueError):
        CurveParams(p=96, a=2, b=3, G=Point(3, 6), n=5, profile_id="bad")
    with pytest.raises(ValueError):
        CurveParams(p=97, a=0, b=0, G=Point(3, 6), n=5, profile_id="bad")


# -- random scalars ------------------------------------------------------------


def test_random_scalar_deterministic_and_in_range():
    a = [random_scalar(SeededRng(5, "x"), TOY.n) for _ in range(3)]
    b = [random_scalar(SeededRng(5, "x"), TOY.n) for _ in range(3)]
    assert a == b
    rng = SeededRng(5, "x")
    draws = [random_scalar(rng, TOY.n) for _ in range(10_000)]
    assert min(draws) >= 1 and max(draws) <= TOY.n - 1
    assert set(draws) == set(range(1, TOY.n))


# -- serialization -------------------------------------------------------------


def test_point_encoding_roundtrip_exhaustive(toy_points):
    for P in toy_points:
        enc = encode_point(P, TOY)
        assert len(enc) == 2
        assert decode_point(enc, TOY) == P
    assert encode_point(IDENTITY, TOY) == b"\x00\x00"


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=1, max_value=STANDARD.n - 1))
def test_point_encoding_roundtrip_standard(k):
    P = scalar_mul(k, STANDARD.G, STANDARD)
    enc = encode_point(P, STANDARD)
    assert enc[0] == 2 + (P.y & 1)
    assert decode_point(enc, STANDARD) == P


def test_decode_rejects_garbage():
    with pytest.raises(InvalidPoint):
        decode_point(b"\x04\x03", TOY)
    with pytest.raises(InvalidPoint):
        decode_point(b"\x02", TOY)


def test_encode_scalar_fixed_width():
    assert encode_scalar(1, STANDARD) == bytes(31) + b"\x01"
    assert encode_scalar(TOY.n + 3, TOY) == b"\x03"
