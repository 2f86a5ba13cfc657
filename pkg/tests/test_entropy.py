import math
from fractions import Fraction

import pytest

from cwlab.entropy import (
    entropy_estimate,
    first_upper_bound_n,
    pairwise_separated,
    periodic_growth,
    separated_set,
    separation_certificate,
    verify_witness,
)
from cwlab.exactlat import CAT_MAP, IntMatrix2
from cwlab.sphere import SpherePoint
from cwlab.toral import TorusPoint, antipodal_periodic_points, grid, periodic_points

from oracles import eigen_log, greedy_separated, trace_sequence

A = CAT_MAP
CAT = ((2, 1), (1, 1))


def test_singleton_when_delta_exceeds_diameter():
    rep = separated_set(A, grid(5), 1, Fraction(1, 2))
    assert rep.s_n_lower == 1 and rep.n_candidates == 25


def test_bad_parameters():
    with pytest.raises(ValueError):
        separated_set(A, grid(3), 2, 0)
    with pytest.raises(ValueError):
        separated_set(A, grid(3), 0, Fraction(1, 10))


@pytest.mark.parametrize("mesh, n, delta", [(6, 1, Fraction(1, 10)), (10, 2, Fraction(1, 10)),
                                            (12, 3, Fraction(1, 5)), (15, 2, Fraction(1, 7))])
def test_greedy_matches_plain_oracle(mesh, n, delta):
    cands = grid(mesh)
    ours = separated_set(A, cands, n, delta).witness
    ref = greedy_separated(CAT, [(p.x, p.y) for p in cands], n, delta)
    assert [(p.x, p.y) for p in ours] == ref


@pytest.mark.parametrize("n", range(1, 6))
def test_periodic_sets_are_separated(n):
    for pts in (periodic_points(A, n).points, antipodal_periodic_points(A, n).points):
        rep = separated_set(A, pts, n, Fraction(1, 5))
        assert rep.s_n_lower == len(pts)


def test_separation_certificate_up_to_eight():
    cert = separation_certificate(A, 8)
    assert len(cert) == 16 and all(v == 0 for v in cert.values())


def test_pairwise_reports_failures():
    p, q = TorusPoint(0, 0), TorusPoint(Fraction(1, 100), 0)
    assert pairwise_separated(A, [p, q], 1, Fraction(1, 10)) == [(p, q)]
    # the unstable direction pulls them apart within a few steps
    assert pairwise_separated(A, [p, q], 6, Fraction(1, 10)) == []


def test_witness_recheck():
    rep = separated_set(A, grid(20), 4, Fraction(1, 10))
    assert not rep.pairwise_checked
    assert verify_witness(A, rep) and rep.pairwise_checked


def test_sphere_uses_quotient_metric():
    # x and -x are the same sphere point; near-antipodal pairs are close on the sphere
    p = TorusPoint(Fraction(1, 10), Fraction(3, 10))
    q = TorusPoint(Fraction(9, 10) - Fraction(1, 100), Fraction(7, 10))
    assert separated_set(A, [p, q], 1, Fraction(1, 20), "sphere").s_n_lower == 1
    assert separated_set(A, [p, q], 1, Fraction(1, 20)).s_n_lower == 2
    assert isinstance(separated_set(A, [p], 1, Fraction(1, 20), "sphere").witness[0], SpherePoint)


def test_greedy_monotone_in_depth():
    counts = [separated_set(A, grid(24), n, Fraction(1, 10)).s_n_lower for n in range(1, 7)]
    assert counts == sorted(counts)


def test_identity_map_has_flat_counts():
    est = entropy_estimate(IntMatrix2(1, 0, 0, 1), Fraction(1, 10), range(1, 6), mesh=12)
    assert est.degenerate and est.slope == pytest.approx(0, abs=1e-12)


def test_fit_needs_four_depths():
    with pytest.raises(ValueError):
        entropy_estimate(A, Fraction(1, 10), [1, 2, 3])


def test_periodic_scheme_slope():
    est = entropy_estimate(A, Fraction(1, 10), range(4, 9), scheme="periodic")
    assert est.relative_error < 0.1
    assert est.counts == {n: trace_sequence(3, n)[n] - 2 for n in range(4, 9)}
    assert est.to_csv().splitlines()[0] == "n,delta,count,scheme,space"


def test_growth_sandwich_and_value():
    rows = periodic_growth(A, range(1, 21))
    t = trace_sequence(3, 20)
    assert [r.trace for r in rows] == t[1:]
    assert all(r.lower_ok and r.upper_ok for r in rows)
    assert rows[9].trace == 15127
    assert abs(rows[9].log_rate - eigen_log(3)) < 2e-4
    assert first_upper_bound_n(A) == 1


def test_growth_rate_decreases_to_log_lambda():
    # log(1 + lambda^-2n)/n drops below float resolution past n ~ 15
    rates = [r.log_rate for r in periodic_growth(A, range(1, 16))]
    assert all(a > b for a, b in zip(rates, rates[1:]))
    assert rates[-1] > eigen_log(3)
    assert math.isclose(periodic_growth(A, [40])[0].log_rate, eigen_log(3), rel_tol=1e-12)
