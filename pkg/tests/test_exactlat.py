import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cwlab.exactlat import CAT_MAP, IntMatrix2, QuadNumber, mat_pow, quad_eigen, smith_normal_form

from oracles import eigen_log, matpow, trace_sequence

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=60)
quads = st.builds(QuadNumber, rationals, rationals)


@given(quads, quads, quads)
def test_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    assert (a - b) + b == a


@given(quads)
def test_inverse_and_norm(a):
    if a.is_zero():
        with pytest.raises(ZeroDivisionError):
            a.inverse()
        return
    assert a * a.inverse() == 1
    assert a.norm() == a.p ** 2 - 5 * a.q ** 2
    assert (a * a.conjugate()).is_rational()


@given(quads, quads)
def test_order_matches_float(a, b):
    # exact comparison must agree with floats whenever they are well separated
    if abs(float(a) - float(b)) > 1e-9:
        assert (a < b) == (float(a) < float(b))


@given(quads)
def test_floor_is_exact(a):
    f = math.floor(a)
    assert f <= a < f + 1
    assert math.ceil(a) == -math.floor(-a)


def test_floor_of_huge_power():
    lam = quad_eigen(CAT_MAP).lam
    for n in (10, 60, 200):
        # lam^n + lam^-n is the integer trace, and 0 < lam^-n < 1
        assert math.floor(lam ** n) == trace_sequence(3, n)[n] - 1


def test_sign_near_cancellation():
    # 161/72 approximates sqrt(5) from above to about 1e-5
    assert QuadNumber(Fraction(161, 72), -1).sign() == 1
    assert QuadNumber(Fraction(-161, 72), 1).sign() == -1


def test_mixed_fields_refused():
    with pytest.raises(ValueError):
        QuadNumber(0, 1, 5) + QuadNumber(0, 1, 12)
    assert QuadNumber(1, 0, 5) + QuadNumber(2, 0, 12) == 3


def test_disc_must_be_nonsquare():
    with pytest.raises(ValueError):
        QuadNumber(1, 1, 4)


def test_matrix_parse_and_powers():
    A = IntMatrix2.parse("2 1 1 1")
    assert A == CAT_MAP
    assert A.to_text() == "2 1 1 1"
    assert mat_pow(A, 2) == IntMatrix2(5, 3, 3, 2)
    assert mat_pow(A, 5).trace == 123
    for n in range(8):
        P = matpow(((2, 1), (1, 1)), n)
        assert mat_pow(A, n) == IntMatrix2(P[0][0], P[0][1], P[1][0], P[1][1])


@pytest.mark.parametrize("text", ["1 0 0 1", "2 1 1 2", "0 1 -1 0", "1 1 0 1"])
def test_non_hyperbolic_rejected(text):
    with pytest.raises(ValueError):
        IntMatrix2.parse(text).check_hyperbolic()


@pytest.mark.parametrize("entries, d", [((1, 1, 1, 0), (1, 1)), ((3, 1, 1, 2), (1, 5)),
                                        ((2, 0, 0, 2), (2, 2)), ((12, 8, 8, 4), (4, 4))])
def test_smith_examples(entries, d):
    M = IntMatrix2(*entries)
    snf = smith_normal_form(M)
    assert (snf.d1, snf.d2) == d
    assert snf.U @ M @ snf.V == snf.D


def test_smith_round_trip_random():
    rng = random.Random(7)
    for _ in range(1000):
        M = IntMatrix2(*(rng.randint(-40, 40) for _ in range(4)))
        if M.is_zero():
            continue
        snf = smith_normal_form(M)
        assert snf.U @ M @ snf.V == snf.D
        assert abs(snf.U.det) == 1 and abs(snf.V.det) == 1
        assert snf.d1 > 0 and snf.d2 >= 0 and snf.d2 % snf.d1 == 0
        assert snf.d1 * snf.d2 == abs(M.det)


def test_smith_zero_matrix():
    with pytest.raises(ValueError):
        smith_normal_form(IntMatrix2(0, 0, 0, 0))


hyperbolic = st.tuples(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6)).filter(
    lambda t: t[1] != 0 and (t[0] * (7 - t[0]) - 1) % t[1] == 0
).map(lambda t: IntMatrix2(t[0], t[1], (t[0] * (7 - t[0]) - 1) // t[1], 7 - t[0]))


@settings(max_examples=40)
@given(hyperbolic)
def test_eigenvectors_exact(A):
    eig = quad_eigen(A)
    for v, mu in ((eig.v_u, eig.lam), (eig.v_s, eig.lam_inv)):
        img = (A.a * v[0] + A.b * v[1], A.c * v[0] + A.d * v[1])
        assert img[0] == mu * v[0] and img[1] == mu * v[1]
    assert eig.lam * eig.lam_inv == 1


def test_cat_map_eigen_data():
    eig = quad_eigen(CAT_MAP)
    assert eig.lam == QuadNumber(Fraction(3, 2), Fraction(1, 2))
    assert eig.log_lambda == pytest.approx(eigen_log(3), abs=1e-15)
    kappa = float(eig.distortion())
    C = float(eig.shadowing_constant())
    assert C / kappa == pytest.approx(math.sqrt(5), rel=1e-12)
    assert 1.5 < kappa < 2.5


@given(st.tuples(rationals, rationals))
def test_eigen_coordinates_round_trip(v):
    eig = quad_eigen(CAT_MAP)
    cu, cs = eig.to_eigen(v)
    back = eig.from_eigen(cu, cs)
    assert back[0] == v[0] and back[1] == v[1]
