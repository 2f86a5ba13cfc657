import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cwlab.exactlat import CAT_MAP, IntMatrix2
from cwlab.sphere import (
    SPINES,
    SpherePoint,
    lift,
    project,
    sphere_apply,
    sphere_least_period,
    sphere_metric,
    sphere_periodic_points,
)
from cwlab.toral import (
    ORIGIN,
    TorusPoint,
    antipodal_periodic_points,
    apply,
    circle_dist,
    least_period,
    per_counts,
    periodic_points,
    random_periodic_point,
    read_points,
    torus_dist,
    wrap,
)

from oracles import brute_kernel, matpow, sphere_classes, trace_sequence

A = CAT_MAP
points = st.builds(TorusPoint, st.fractions(0, 1, max_denominator=97), st.fractions(0, 1, max_denominator=97))


def P(a, b):
    return TorusPoint(Fraction(a), Fraction(b))


def test_point_text_round_trip():
    p = P("2/5", "4/5")
    assert TorusPoint.parse(p.to_text()) == p
    assert P(Fraction(7, 5), -Fraction(1, 5)) == P("2/5", "4/5")
    assert read_points(["# header", "1/2 0", ""]) == [P("1/2", 0)]
    with pytest.raises(ValueError):
        TorusPoint.parse("1/2")


def test_wrap_tie_goes_up():
    assert wrap(Fraction(1, 2)) == Fraction(1, 2)
    assert wrap(Fraction(-1, 2)) == Fraction(1, 2)
    assert wrap(Fraction(3, 4)) == Fraction(-1, 4)
    assert circle_dist(Fraction(1, 10), Fraction(9, 10)) == Fraction(1, 5)


@given(points, points, points)
def test_metric_axioms(p, q, r):
    assert torus_dist(p, q) == torus_dist(q, p)
    assert torus_dist(p, r) <= torus_dist(p, q) + torus_dist(q, r)
    assert (torus_dist(p, q) == 0) == (p == q)
    assert torus_dist(p, q) <= Fraction(1, 2)


@given(points)
def test_map_commutes_with_negation(p):
    assert apply(A, -p) == -apply(A, p)


def test_least_period_examples():
    assert least_period(A, ORIGIN, 10) == 1
    assert least_period(A, P("1/2", 0), 10) == 3
    assert least_period(A, P("1/7", "3/7"), 2) is None


@pytest.mark.parametrize("n", range(1, 6))
def test_periodic_sets_match_brute_force(n):
    M = matpow(((2, 1), (1, 1)), n)
    per = periodic_points(A, n)
    per_m = antipodal_periodic_points(A, n)
    assert {(p.x, p.y) for p in per} == brute_kernel(M, 1)
    assert {(p.x, p.y) for p in per_m} == brute_kernel(M, -1)


def test_counts_follow_trace_recurrence():
    t = trace_sequence(3, 12)
    for n in range(1, 13):
        assert per_counts(A, n) == (t[n] - 2, t[n] + 2)


def test_fixed_and_antipodal_fixed_points():
    assert periodic_points(A, 1).points == (ORIGIN,)
    assert set(antipodal_periodic_points(A, 1)) == {
        ORIGIN, P("1/5", "2/5"), P("2/5", "4/5"), P("3/5", "1/5"), P("4/5", "3/5")}


def test_periodic_csv():
    text = periodic_points(A, 2).to_csv().splitlines()
    assert text[0] == "n,kind,x_num,x_den,y_num,y_den"
    assert len(text) == 6


def test_random_periodic_point_is_periodic():
    rng = random.Random(0)
    for n in (3, 7, 15):
        p = random_periodic_point(A, n, rng)
        assert least_period(A, p, n) is not None
        q = random_periodic_point(A, n, rng, kind="antipodal")
        x = q
        for _ in range(n):
            x = apply(A, x)
        assert x == -q


def test_non_hyperbolic_singular_kernel():
    with pytest.raises(ValueError):
        periodic_points(IntMatrix2(1, 1, 0, 1), 1)


# sphere


def test_sphere_canonical_rep():
    s = project(P("3/5", "1/5"))
    assert s == project(P("2/5", "4/5"))
    assert s.rep == P("2/5", "4/5")
    assert lift(SPINES[0]) == frozenset({ORIGIN})
    assert len(lift(s)) == 2


def test_spine_cycle():
    s = SpherePoint(P("1/2", 0))
    assert sphere_apply(A, s) == SpherePoint(P(0, "1/2"))
    assert sphere_least_period(A, s, 5) == 3
    assert sphere_apply(A, SPINES[0]) == SPINES[0]
    assert sum(sp.is_spine for sp in SPINES) == 4


@given(points, points)
def test_sphere_metric_is_quotient(p, q):
    d = sphere_metric(project(p), project(q))
    assert d == min(torus_dist(p, q), torus_dist(p, -q))
    assert sphere_metric(project(p), project(p)) == 0


@given(points)
def test_semiconjugacy(p):
    assert project(apply(A, p)) == sphere_apply(A, project(p))


@pytest.mark.parametrize("n", range(1, 6))
def test_sphere_count_and_fibers(n):
    t = trace_sequence(3, n)[n]
    sp = sphere_periodic_points(A, n)
    assert len(sp) == t
    assert sp.two_to_one
    M = matpow(((2, 1), (1, 1)), n)
    brute = sphere_classes(brute_kernel(M, 1) | brute_kernel(M, -1))
    assert {(s.rep.x, s.rep.y) for s in sp} == brute


def test_sphere_period_two_count():
    assert len(sphere_periodic_points(A, 2)) == 7
    assert [s for s in sphere_periodic_points(A, 3).spines] == sorted(SPINES)
