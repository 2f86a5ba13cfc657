"""Acceptance criteria, each at its stated tolerance.

Every test records a PASS/FAIL line; the session summary prints one line per
criterion.  The grid entropy slope is run literally and is expected to fail:
a 60 x 60 candidate grid caps the separated-set count at 3600, which is far
below the growth the slope needs.  It is marked as a strict expected failure
so the suite reports it without hiding it.
"""

import math
import random
import time
from fractions import Fraction

import pytest

from cwlab.carpet import (
    carpet_periodic_count,
    circle_mass_fraction,
    closed_form_count,
    projected_discrepancy,
    registry_from_periods,
)
from cwlab.entropy import entropy_estimate, periodic_growth, separation_certificate
from cwlab.exactlat import CAT_MAP, quad_eigen
from cwlab.measures import (
    discrepancy,
    frequencies,
    homogeneity_probe,
    periodic_measure,
    sphere_character_closed_form,
    weak_star_certificate,
)
from cwlab.shadowing import (
    SpecificationRequest,
    make_pseudo_orbit,
    periodic_specification,
    shadow_periodic,
    shadow_periodic_sphere,
    specification_decay,
)
from cwlab.sphere import project, sphere_iterate, sphere_periodic_points
from cwlab.toral import ORIGIN, TorusPoint, antipodal_periodic_points, iterate, periodic_points, random_periodic_point

from conftest import record
from oracles import eigen_log, trace_sequence

A = CAT_MAP
T = trace_sequence(3, 20)
LOG_LAMBDA = eigen_log(3)


def test_criterion_1_counting():
    start = time.perf_counter()
    ok = True
    for n in range(1, 13):
        per, per_m = periodic_points(A, n), antipodal_periodic_points(A, n)
        sp = sphere_periodic_points(A, n, per, per_m)
        ok &= len(per) == T[n] - 2 and len(per_m) == T[n] + 2 and len(sp) == T[n] and sp.two_to_one
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60
    record(1, ok, f"n=1..12 counts exact with 2-to-1 fibers, {elapsed:.1f}s (limit 60s)")
    assert ok


@pytest.mark.xfail(strict=True, reason="60x60 grid saturates at 3600 candidates")
def test_criterion_2_grid_slope():
    parts = []
    ok = True
    for space in ("torus", "sphere"):
        est = entropy_estimate(A, Fraction(1, 10), range(4, 11), "grid", 60, space)
        ok &= est.relative_error <= 0.10
        parts.append(f"{space} slope {est.slope:.4f} (rel. error {est.relative_error:.2f}, counts "
                     f"{list(est.counts.values())})")
    record(2, ok, "grid mesh 1/60, delta 0.1, n=4..10: " + ", ".join(parts) + f" vs log lambda {LOG_LAMBDA:.4f}")
    assert ok


def test_criterion_2_periodic_growth():
    row = periodic_growth(A, [10])[0]
    err = abs(row.log_rate - quad_eigen(A).log_lambda)
    ok = row.trace == 15127 and err <= 2e-4
    record(2, ok, f"log(Per_10)/10 = {row.log_rate:.10f}, |diff| = {err:.1e} (limit 2e-4)")
    assert ok


def test_criterion_2_periodic_candidates_diagnostic():
    # not part of the criterion: the same fit with periodic-point candidates
    parts = []
    for space in ("torus", "sphere"):
        est = entropy_estimate(A, Fraction(1, 10), range(4, 11), "periodic", space=space)
        parts.append(f"{space} {est.slope:.4f}")
    record(2, True, "diagnostic, periodic-point candidates: " + ", ".join(parts))


def test_criterion_3_growth_sandwich():
    rows = periodic_growth(A, range(1, 21))
    ok = all(r.lower_ok and r.upper_ok for r in rows) and [r.trace for r in rows] == T[1:]
    record(3, ok, "lambda^n <= Per_n(g_A) <= 2 lambda^n exact for n=1..20")
    assert ok


def test_criterion_4_separation():
    cert = separation_certificate(A, 8, Fraction(1, 5))
    failures = sum(cert.values())
    record(4, failures == 0, f"{failures} failing pairs over P_n and P_n^- for n <= 8")
    assert failures == 0


def test_criterion_5_periodic_shadowing():
    C = float(quad_eigen(A).shadowing_constant())
    kappa = float(quad_eigen(A).distortion())
    failures, worst, runs = 0, 0.0, 0
    start = time.perf_counter()
    for space in ("torus", "sphere"):
        for i in range(200):
            rng = random.Random(i)
            N = rng.randint(1, 200)
            delta = Fraction(1, 10 ** (2 + i % 3))
            x0 = random_periodic_point(A, N, rng)
            po = make_pseudo_orbit(A, x0, N, delta, seed=i, space=space)
            if space == "torus":
                res = shadow_periodic(A, po)
                closed = iterate(A, res.z0, N) == res.z0
            else:
                res = shadow_periodic_sphere(A, po)
                closed = sphere_iterate(A, res.z0, N) == res.z0
            runs += 1
            if po.delta:
                worst = max(worst, float(res.epsilon) / float(po.delta))
            if not (po.periodic and closed and float(res.epsilon) <= C * float(po.delta)):
                failures += 1
    elapsed = time.perf_counter() - start
    record(5, failures == 0, f"{runs} orbits (200 torus, 200 sphere), C = {C:.4f} = {C / kappa:.3f} kappa, "
                             f"max eps/delta {worst:.3f}, {failures} failures, {elapsed / runs:.2f}s per orbit")
    assert failures == 0


def test_criterion_6_specification():
    p, q = ORIGIN, TorusPoint(Fraction(2, 5), Fraction(4, 5))
    worst = Fraction(0)
    ok = True
    for L in range(12, 41, 4):
        res = periodic_specification(A, SpecificationRequest([(p, 5), (q, 4)], L))
        ok &= iterate(A, res.z0, res.period) == res.z0
        worst = max(worst, max(res.segment_errors))
    ok &= worst <= Fraction(5, 100)
    d = specification_decay(A, ORIGIN, TorusPoint(Fraction(1, 2), Fraction(1, 2)), range(12, 41, 2))
    rel = abs(d["slope"] - d["expected"]) / abs(d["expected"])
    ok &= rel <= 0.10
    record(6, ok, f"L=12..40 worst segment error {float(worst):.2e} (limit 0.05); decay slope {d['slope']:.4f} "
                  f"vs -(log lambda)/2 = {d['expected']:.4f}, rel. error {rel:.3f}")
    assert ok


def test_criterion_7_weak_star():
    torus = [discrepancy(periodic_measure(A, n), 3).value for n in range(5, 16)]
    cert = weak_star_certificate(A, 3, 5)
    torus_ok = all(v == 0 for v in torus) and cert.holds
    sphere = [discrepancy(periodic_measure(A, n, "sphere"), 3).value for n in range(1, 11)]
    sphere_ok = all(a >= b for a, b in zip(sphere, sphere[1:])) and sphere[-1] <= Fraction(2, 100)
    push_ok = all(periodic_measure(A, n, "torus", True).pushforward(project, "sphere").atoms
                  == periodic_measure(A, n, "sphere", True).atoms for n in range(1, 9))
    ok = torus_ok and sphere_ok and push_ok
    record(7, ok, f"torus D_3 = 0 for n=5..15 and certified for all n >= 5 (checked n < {cert.n_bound}); "
                  f"sphere D_3 n=1..10 = {[round(float(v), 4) for v in sphere]}; "
                  f"pushforward identity n <= 8: {push_ok}")
    assert ok


def test_criterion_8_homogeneity():
    table = homogeneity_probe(A, 10, [2, 3, 4, 5], Fraction(1, 10), 50, seed=0)
    ratios = [round(r, 3) for r in table.ratios]
    ok = table.ratio_spread <= 2
    record(8, ok, f"r=10, eps=0.1, 50 centers: max/min by n=2..5 {ratios}, spread {table.ratio_spread:.3f} "
                  f"(limit 2), empty balls {list(table.zero_flags)}")
    assert ok


def _sphere_d3(n):
    # closed form, so n up to 20 needs no enumeration
    return max(abs(sphere_character_closed_form(A, n, k)) for k in frequencies(3, True))


@pytest.mark.parametrize("periods", [(3, 4), (1, 2)])
def test_criterion_9_carpet(periods):
    reg = registry_from_periods(A, periods)
    lam = quad_eigen(A).lam
    ok = True
    worst_gap = 0.0
    for n in range(1, 21):
        c = carpet_periodic_count(A, reg, n)
        ok &= c.carpet_count == closed_form_count(A, periods, n)
        ok &= abs(c.carpet_count - T[n]) <= 4 * n * n and lam ** n <= c.carpet_count
        frac = circle_mass_fraction(A, reg, n)
        bound = Fraction(4 * n * n, T[n])
        ok &= frac <= bound
        gap = abs(float(projected_discrepancy(A, reg, n).value) - float(_sphere_d3(n)))
        ok &= gap <= float(bound)
        worst_gap = max(worst_gap, gap / float(bound))
    record(9, ok, f"periods {set(periods)}, n=1..20: counts match closed form, within 4n^2, >= lambda^n; "
                  f"circle fraction <= 4n^2/trace; worst D gap / bound {worst_gap:.3f}")
    assert ok
