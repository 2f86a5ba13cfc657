"""The Anosov automorphism f_A of the torus R^2/Z^2 on exact rational points.

Points are kept in the fundamental domain [0, 1)^2 rather than the centred
square [-1/2, 1/2]^2; the two quotients are the same torus, and a single
canonical form keeps equality, hashing and sorting trivial.  In these
coordinates the antipodal map is ``(x, y) -> (-x mod 1, -y mod 1)``.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .exactlat import IntMatrix2, mat_pow, smith_normal_form

PERIODIC = "periodic"
ANTIPODAL = "antipodal"


@dataclass(frozen=True, order=True)
class TorusPoint:
    """Rational point of the torus, both coordinates reduced into [0, 1)."""

    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x) % 1)
        object.__setattr__(self, "y", Fraction(self.y) % 1)

    @classmethod
    def parse(cls, text: str) -> "TorusPoint":
        """Read the text form ``"p/q r/s"``."""
        parts = text.split()
        if len(parts) != 2:
            raise ValueError(f"torus point needs two fractions, got {text!r}")
        return cls(Fraction(parts[0]), Fraction(parts[1]))

    def to_text(self) -> str:
        return f"{self.x.numerator}/{self.x.denominator} {self.y.numerator}/{self.y.denominator}"

    def __neg__(self) -> "TorusPoint":
        return TorusPoint(-self.x, -self.y)

    def __add__(self, other) -> "TorusPoint":
        ox, oy = other
        return TorusPoint(self.x + ox, self.y + oy)

    def __iter__(self):
        yield self.x
        yield self.y

    def __getitem__(self, i):
        return (self.x, self.y)[i]

    @property
    def denominator(self) -> int:
        return math.lcm(self.x.denominator, self.y.denominator)

    def is_half_integer(self) -> bool:
        return 2 * self.x in (0, 1) and 2 * self.y in (0, 1)

    def __repr__(self):
        return f"TorusPoint({self.to_text()})"


ORIGIN = TorusPoint(Fraction(0), Fraction(0))


def wrap(value):
    """Representative of ``value`` mod 1 in (-1/2, 1/2]; exact ties go to +1/2."""
    return value - math.ceil(value - Fraction(1, 2))


def circle_dist(a, b):
    """Distance on R/Z between two reals (rational or quadratic-field)."""
    return abs(wrap(a - b))


def torus_dist(p, q):
    """Sup metric on the torus: the larger coordinatewise circle distance."""
    return max(circle_dist(p[0], q[0]), circle_dist(p[1], q[1]))


def apply(A: IntMatrix2, p: TorusPoint) -> TorusPoint:
    return TorusPoint(A.a * p.x + A.b * p.y, A.c * p.x + A.d * p.y)


def iterate(A: IntMatrix2, p: TorusPoint, n: int) -> TorusPoint:
    """``f_A^n(p)`` via one multiplication by ``A^n``."""
    return apply(mat_pow(A, n), p)


def orbit(A: IntMatrix2, p: TorusPoint, n: int) -> list[TorusPoint]:
    """``[p, f(p), ..., f^(n-1)(p)]``."""
    out = []
    for _ in range(n):
        out.append(p)
        p = apply(A, p)
    return out


def least_period(A: IntMatrix2, p: TorusPoint, bound: int) -> Optional[int]:
    """Smallest ``m <= bound`` with ``f^m(p) = p``; ``None`` means the bound was exceeded."""
    q = apply(A, p)
    for m in range(1, bound + 1):
        if q == p:
            return m
        q = apply(A, q)
    return None


@dataclass(frozen=True)
class PeriodicSet:
    """Solutions of ``f^n(x) = x`` (kind periodic) or ``f^n(x) = -x`` (kind antipodal).

    ``points`` is sorted lexicographically.  ``denominator`` and ``numerators``
    give the same set as integer vectors over a common denominator, which the
    vectorised consumers (measures, Bowen balls) use directly.
    """

    n: int
    kind: str
    points: tuple
    denominator: int
    numerators: np.ndarray
    generators: tuple

    def __len__(self):
        return len(self.points)

    def __iter__(self) -> Iterator[TorusPoint]:
        return iter(self.points)

    def __contains__(self, p) -> bool:
        return p in self.point_set

    @property
    def point_set(self) -> frozenset:
        cached = self.__dict__.get("_point_set")
        if cached is None:
            cached = frozenset(self.points)
            object.__setattr__(self, "_point_set", cached)
        return cached

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "kind", "x_num", "x_den", "y_num", "y_den"])
        for p in self.points:
            w.writerow([self.n, self.kind, p.x.numerator, p.x.denominator, p.y.numerator, p.y.denominator])
        return buf.getvalue()


def kernel_lattice(M: IntMatrix2):
    """The finite group ``{x in T^2 : M x = 0 mod Z^2}`` for nonsingular integer ``M``.

    Returns ``(den, numerators, generators)``: every solution is
    ``numerators[i] / den``, enumerated as ``V (k1/d1, k2/d2)`` over the Smith
    cosets; ``generators`` are the two SNF generators as rational pairs.
    """
    snf = smith_normal_form(M)
    d1, d2 = snf.d1, snf.d2
    if d2 == 0:
        raise ValueError("kernel of a singular matrix on the torus is infinite")
    V = snf.V
    step = d2 // d1
    k1 = np.repeat(np.arange(d1, dtype=object) * step, d2)
    k2 = np.tile(np.arange(d2, dtype=object), d1)
    nx = (V.a * k1 + V.b * k2) % d2
    ny = (V.c * k1 + V.d * k2) % d2
    nums = np.stack([nx, ny], axis=1)
    if d2 < 2**62 // 8:
        nums = nums.astype(np.int64)
    gens = (
        (Fraction(V.a, d1) % 1, Fraction(V.c, d1) % 1),
        (Fraction(V.b, d2) % 1, Fraction(V.d, d2) % 1),
    )
    return d2, nums, gens


def _build(n: int, kind: str, M: IntMatrix2) -> PeriodicSet:
    den, nums, gens = kernel_lattice(M)
    pts = sorted(TorusPoint(Fraction(int(a), den), Fraction(int(b), den)) for a, b in nums)
    return PeriodicSet(n=n, kind=kind, points=tuple(pts), denominator=den, numerators=nums, generators=gens)


def periodic_points(A: IntMatrix2, n: int) -> PeriodicSet:
    """All ``x`` with ``f_A^n(x) = x``: the kernel of ``A^n - I`` on the torus."""
    if n < 1:
        raise ValueError("period must be >= 1")
    return _build(n, PERIODIC, mat_pow(A, n) - IntMatrix2.identity())


def antipodal_periodic_points(A: IntMatrix2, n: int) -> PeriodicSet:
    """All ``x`` with ``f_A^n(x) = -x``: the kernel of ``A^n + I`` on the torus."""
    if n < 1:
        raise ValueError("period must be >= 1")
    return _build(n, ANTIPODAL, mat_pow(A, n) + IntMatrix2.identity())


def per_counts(A: IntMatrix2, n: int) -> tuple[int, int]:
    """Closed-form ``(Per_n, Per_n^-) = (trace(A^n) - 2, trace(A^n) + 2)``."""
    if n < 1:
        raise ValueError("period must be >= 1")
    t = mat_pow(A, n).trace
    return t - 2, t + 2


def random_periodic_point(A: IntMatrix2, n: int, rng: random.Random, kind: str = PERIODIC) -> TorusPoint:
    """Uniform random element of ``P_n`` (or ``P_n^-``) drawn from the Smith cosets."""
    M = mat_pow(A, n) + (IntMatrix2.identity() if kind == ANTIPODAL else -IntMatrix2.identity())
    snf = smith_normal_form(M)
    k1 = rng.randrange(snf.d1)
    k2 = rng.randrange(snf.d2)
    V = snf.V
    return TorusPoint(Fraction(V.a * k1, snf.d1) + Fraction(V.b * k2, snf.d2),
                      Fraction(V.c * k1, snf.d1) + Fraction(V.d * k2, snf.d2))


def is_periodic(A: IntMatrix2, p: TorusPoint, n: int) -> bool:
    return iterate(A, p, n) == p


def is_antipodal_periodic(A: IntMatrix2, p: TorusPoint, n: int) -> bool:
    return iterate(A, p, n) == -p


def grid(mesh_den: int) -> list[TorusPoint]:
    """The rational grid ``{(i/m, j/m)}`` of mesh ``1/m``."""
    return [TorusPoint(Fraction(i, mesh_den), Fraction(j, mesh_den))
            for i in range(mesh_den) for j in range(mesh_den)]


def read_points(lines: Iterable[str]) -> list[TorusPoint]:
    return [TorusPoint.parse(line) for line in lines if line.strip() and not line.startswith("#")]
