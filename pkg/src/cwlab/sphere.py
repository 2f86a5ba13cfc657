"""Sphere factor of the toral map: the torus modulo x ~ -x.

A sphere point is stored as its canonical torus representative, the
lexicographically smaller of ``x`` and ``-x``.  The four self-antipodal
classes (half-integer points) are the spines; they are recognised from their
coordinates, never numerically.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .exactlat import IntMatrix2, mat_pow
from .toral import (
    TorusPoint,
    antipodal_periodic_points,
    apply,
    periodic_points,
    torus_dist,
)


@dataclass(frozen=True, order=True)
class SpherePoint:
    rep: TorusPoint

    def __post_init__(self):
        neg = -self.rep
        if neg < self.rep:
            object.__setattr__(self, "rep", neg)

    @property
    def is_spine(self) -> bool:
        return self.rep.is_half_integer()

    def to_text(self) -> str:
        return self.rep.to_text()

    def __repr__(self):
        return f"SpherePoint({self.rep.to_text()}{', spine' if self.is_spine else ''})"


SPINES = tuple(
    SpherePoint(TorusPoint(Fraction(a, 2), Fraction(b, 2))) for a, b in ((0, 0), (1, 0), (0, 1), (1, 1))
)


def project(p: TorusPoint) -> SpherePoint:
    """The quotient map T^2 -> S^2."""
    return SpherePoint(p)


def lift(s: SpherePoint) -> frozenset:
    """Both torus preimages of ``s`` (one for a spine)."""
    return frozenset((s.rep, -s.rep))


def sphere_apply(A: IntMatrix2, s: SpherePoint) -> SpherePoint:
    # A commutes with negation, so either lift gives the same class
    return SpherePoint(apply(A, s.rep))


def sphere_iterate(A: IntMatrix2, s: SpherePoint, n: int) -> SpherePoint:
    return SpherePoint(apply(mat_pow(A, n), s.rep))


def sphere_orbit(A: IntMatrix2, s: SpherePoint, n: int) -> list[SpherePoint]:
    out = []
    for _ in range(n):
        out.append(s)
        s = sphere_apply(A, s)
    return out


def sphere_least_period(A: IntMatrix2, s: SpherePoint, bound: int):
    t = sphere_apply(A, s)
    for m in range(1, bound + 1):
        if t == s:
            return m
        t = sphere_apply(A, t)
    return None


def sphere_metric(s1: SpherePoint, s2: SpherePoint):
    """Quotient of the torus sup metric: distance to the nearer lift."""
    x, y = s1.rep, s2.rep
    return min(torus_dist(x, y), torus_dist(x, (-y[0], -y[1])))


def lift_dist(x, y):
    """Quotient distance for arbitrary (possibly irrational) torus coordinates."""
    return min(torus_dist(x, y), torus_dist(x, (-y[0], -y[1])))


@dataclass(frozen=True)
class SpherePeriodicSet:
    """``P_n(g_A)`` with the fiber certificate from ``P_n(f_A)`` and ``P_n^-(f_A)``."""

    n: int
    points: tuple
    fiber_sizes: dict

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def spines(self) -> tuple:
        return tuple(s for s in self.points if s.is_spine)

    @property
    def two_to_one(self) -> bool:
        return all(v == 2 for v in self.fiber_sizes.values())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "x_num", "x_den", "y_num", "y_den", "spine"])
        for s in self.points:
            p = s.rep
            w.writerow([self.n, p.x.numerator, p.x.denominator, p.y.numerator, p.y.denominator, int(s.is_spine)])
        return buf.getvalue()


def sphere_periodic_points(A: IntMatrix2, n: int, per=None, per_minus=None) -> SpherePeriodicSet:
    """``P_n(g_A) = pi(P_n(f_A) u P_n^-(f_A))``, deduplicated and certified.

    The fiber of each class counts its preimages in ``P_n`` and ``P_n^-``
    separately, so a spine (which lies in both) has fiber size 2 just like an
    ordinary antipodal pair.  A count other than ``trace(A^n)`` means the
    enumeration is broken and raises ``AssertionError``.
    """
    per = periodic_points(A, n) if per is None else per
    per_minus = antipodal_periodic_points(A, n) if per_minus is None else per_minus
    fibers: Counter = Counter()
    for p in per.points:
        fibers[SpherePoint(p)] += 1
    for p in per_minus.points:
        fibers[SpherePoint(p)] += 1
    expected = mat_pow(A, n).trace
    if len(fibers) != expected:
        raise AssertionError(f"enumerated {len(fibers)} sphere points of period {n}, expected {expected}")
    return SpherePeriodicSet(n=n, points=tuple(sorted(fibers)), fiber_sizes=dict(fibers))
