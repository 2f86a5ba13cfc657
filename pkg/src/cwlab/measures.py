"""Periodic-orbit measures, their character integrals, and Bowen balls.

Test functions are the characters ``exp(2 pi i k.x)`` on the torus and the
antipodally symmetric ``cos(2 pi k.x)`` on the sphere.  Both integrate to zero
against Haar (resp. its image on the sphere) for ``k != 0``, so the largest
character integral up to a frequency cutoff measures distance from the
maximal-entropy measure.

Periodic measures are uniform on finite subgroups of the torus (or signed
combinations of them), and a character sums to ``|G|`` or ``0`` over a
subgroup ``G`` according to whether it is trivial on ``G``.  Measures built
here carry that structure so their integrals come out as exact rationals.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import numpy as np

from .exactlat import IntMatrix2, mat_pow, quad_eigen, smith_normal_form
from .sphere import SpherePoint, sphere_apply, sphere_metric, sphere_periodic_points
from .toral import (
    PeriodicSet,
    TorusPoint,
    antipodal_periodic_points,
    apply,
    periodic_points,
    torus_dist,
)

TORUS = "torus"
SPHERE = "sphere"
MP_BITS = 128


@dataclass(frozen=True)
class GroupTerm:
    """``coef * sum_{x in G} delta_x`` for the subgroup ``G`` spanned by ``generators``."""

    coef: Fraction
    generators: tuple
    size: int


@dataclass(frozen=True)
class AtomTerm:
    coef: Fraction
    point: TorusPoint


@dataclass
class EmpiricalMeasure:
    """Finitely supported probability measure with exact rational weights.

    ``atoms`` maps canonical points to weights.  ``terms``, when present,
    expresses the same measure (on torus lifts) as a combination of subgroup
    sums and single atoms; :func:`character_integral` uses it for exact
    evaluation.
    """

    space: str
    atoms: dict
    terms: Optional[list] = None
    label: str = ""

    def __len__(self):
        return len(self.atoms)

    @property
    def total_mass(self) -> Fraction:
        return sum(self.atoms.values(), Fraction(0))

    def weight(self, p) -> Fraction:
        return self.atoms.get(p, Fraction(0))

    def pushforward(self, func, space: str) -> "EmpiricalMeasure":
        out: dict = {}
        for p, w in self.atoms.items():
            q = func(p)
            out[q] = out.get(q, Fraction(0)) + w
        return EmpiricalMeasure(space, dict(sorted(out.items())))

    def to_csv(self) -> str:
        lines = ["x_num,x_den,y_num,y_den,weight"]
        for p, w in self.atoms.items():
            r = p.rep if isinstance(p, SpherePoint) else p
            lines.append(f"{r.x.numerator},{r.x.denominator},{r.y.numerator},{r.y.denominator},{w}")
        return "\n".join(lines) + "\n"


def _uniform(space, points, terms=None, label="") -> EmpiricalMeasure:
    w = Fraction(1, len(points))
    return EmpiricalMeasure(space, {p: w for p in sorted(points)}, terms, label)


def _spines_in(pset: PeriodicSet) -> list:
    return [p for p in pset.points if p.is_half_integer()]


def periodic_measure(A: IntMatrix2, n: int, space: str = TORUS, starred: bool = False,
                     per: PeriodicSet = None, per_minus: PeriodicSet = None) -> EmpiricalMeasure:
    """Uniform measure on the period-``n`` points.

    torus:            ``P_n(f_A)``
    torus, starred:   ``P*_n(f_A)``, the non-half-integer points of ``P_n u P_n^-``
    sphere:           ``P_n(g_A)``
    sphere, starred:  ``P*_n(g_A)``, the non-spine points of ``P_n(g_A)``
    """
    if n < 1:
        raise ValueError("period must be >= 1")
    per = periodic_points(A, n) if per is None else per
    if space == TORUS and not starred:
        terms = [GroupTerm(Fraction(1, len(per)), per.generators, len(per))]
        return _uniform(TORUS, per.points, terms, f"mu_{n} torus")

    per_minus = antipodal_periodic_points(A, n) if per_minus is None else per_minus
    spines = _spines_in(per)
    if space == TORUS:
        pts = set(per.points) | set(per_minus.points)
        pts -= set(spines)
        c = Fraction(1, len(pts))
        terms = [GroupTerm(c, per.generators, len(per)), GroupTerm(c, per_minus.generators, len(per_minus))]
        terms += [AtomTerm(-2 * c, s) for s in spines]
        return _uniform(TORUS, pts, terms, f"nu_{n} torus starred")
    if space != SPHERE:
        raise ValueError(f"unknown space {space!r}")

    sp = sphere_periodic_points(A, n, per, per_minus)
    pts = [s for s in sp.points if not (starred and s.is_spine)]
    c = Fraction(1, len(pts))
    terms = [GroupTerm(c / 2, per.generators, len(per)), GroupTerm(c / 2, per_minus.generators, len(per_minus))]
    if starred:
        terms += [AtomTerm(-c, s) for s in spines]
    return _uniform(SPHERE, pts, terms, f"mu_{n} sphere{' starred' if starred else ''}")


# --------------------------------------------------------------------------
# characters


@dataclass(frozen=True)
class CharacterValue:
    """Character integral; ``re``/``im`` are Fractions when ``exact`` else mpmath numbers."""

    re: object
    im: object
    exact: bool
    trivial: bool = False

    def __abs__(self):
        if self.exact and self.im == 0:
            return abs(self.re)
        with mpmath.workprec(MP_BITS):
            return mpmath.sqrt(mpmath.mpf(self.re) ** 2 + mpmath.mpf(self.im) ** 2)

    def to_json(self):
        return {"re": str(self.re), "im": str(self.im), "exact": self.exact}


def _dot_mod1(k, p) -> Fraction:
    return (k[0] * Fraction(p[0]) + k[1] * Fraction(p[1])) % 1


def character_trivial_on(k, generators) -> bool:
    """True when ``exp(2 pi i k.x)`` is 1 on the subgroup spanned by ``generators``."""
    return all(_dot_mod1(k, g) == 0 for g in generators)


def _atom_value(k, p, symmetric: bool):
    r = _dot_mod1(k, p)
    if r == 0:
        return Fraction(1), Fraction(0), True
    if r == Fraction(1, 2):
        return Fraction(-1), Fraction(0), True
    if symmetric and r in (Fraction(1, 4), Fraction(3, 4)):
        return Fraction(0), Fraction(0), True
    with mpmath.workprec(MP_BITS):
        ang = 2 * mpmath.pi * mpmath.mpf(r.numerator) / r.denominator
        return mpmath.cos(ang), (mpmath.mpf(0) if symmetric else mpmath.sin(ang)), False


def character_integral(mu: EmpiricalMeasure, k) -> CharacterValue:
    """``sum_j w_j exp(2 pi i k.x_j)`` (torus) or ``sum_j w_j cos(2 pi k.x_j)`` (sphere)."""
    k = (int(k[0]), int(k[1]))
    if k == (0, 0):
        return CharacterValue(mu.total_mass, Fraction(0), True, trivial=True)
    symmetric = mu.space == SPHERE
    if mu.terms is None:
        return character_integral_direct(mu, k)
    re_exact, im_exact = Fraction(0), Fraction(0)
    re_num, im_num = mpmath.mpf(0), mpmath.mpf(0)
    exact = True
    for t in mu.terms:
        if isinstance(t, GroupTerm):
            if character_trivial_on(k, t.generators):
                re_exact += t.coef * t.size
        else:
            re, im, ex = _atom_value(k, t.point, symmetric)
            if ex:
                re_exact += t.coef * re
                im_exact += t.coef * im
            else:
                exact = False
                with mpmath.workprec(MP_BITS):
                    c = mpmath.mpf(t.coef.numerator) / t.coef.denominator
                    re_num += c * re
                    im_num += c * im
    if exact:
        return CharacterValue(re_exact, im_exact, True)
    with mpmath.workprec(MP_BITS):
        return CharacterValue(re_num + mpmath.mpf(re_exact.numerator) / re_exact.denominator,
                              im_num + mpmath.mpf(im_exact.numerator) / im_exact.denominator, False)


def _mobius(q: int) -> int:
    out, p = 1, 2
    while p * p <= q:
        if q % p == 0:
            q //= p
            if q % p == 0:
                return 0
            out = -out
        p += 1
    return -out if q > 1 else out


def character_integral_direct(mu: EmpiricalMeasure, k) -> CharacterValue:
    """Atom-by-atom evaluation with the phases ``k.x mod 1`` reduced exactly first.

    Phases are grouped by denominator ``q``.  When one weight sits on every
    primitive ``q``-th root of unity, that group sums exactly to ``w mu(q)``
    (a Ramanujan sum); other groups are summed at 128 bits.
    """
    symmetric = mu.space == SPHERE
    buckets: dict = {}
    for p, w in mu.atoms.items():
        r = p.rep if isinstance(p, SpherePoint) else p
        phase = _dot_mod1(k, r)
        buckets[phase] = buckets.get(phase, Fraction(0)) + w
    by_den: dict = {}
    for phase, w in buckets.items():
        by_den.setdefault(phase.denominator, {})[phase] = w
    re_exact, im_exact = Fraction(0), Fraction(0)
    exact = True
    with mpmath.workprec(MP_BITS):
        re_num, im_num = mpmath.mpf(0), mpmath.mpf(0)
        for q, group in by_den.items():
            weights = set(group.values())
            if q <= 2:
                re_exact += sum(w if ph == 0 else -w for ph, w in group.items())
                continue
            if len(weights) == 1 and len(group) == _totient(q):
                re_exact += weights.pop() * _mobius(q)
                continue
            for phase, w in group.items():
                if symmetric and q == 4:
                    continue
                exact = False
                ang = 2 * mpmath.pi * mpmath.mpf(phase.numerator) / phase.denominator
                c = mpmath.mpf(w.numerator) / w.denominator
                re_num += c * mpmath.cos(ang)
                if not symmetric:
                    im_num += c * mpmath.sin(ang)
        if exact:
            return CharacterValue(re_exact, im_exact, True)
        return CharacterValue(re_num + mpmath.mpf(re_exact.numerator) / re_exact.denominator, im_num, False)


def _totient(q: int) -> int:
    return sum(1 for r in range(1, q + 1) if math.gcd(r, q) == 1)


def frequencies(K: int, symmetric: bool) -> list:
    """Nonzero ``k`` with ``|k|_inf <= K``; one representative of each ``{k, -k}`` when symmetric."""
    out = []
    for k in itertools.product(range(-K, K + 1), repeat=2):
        if k == (0, 0):
            continue
        if symmetric and (k[0] < 0 or (k[0] == 0 and k[1] < 0)):
            continue
        out.append(k)
    return out


@dataclass
class DiscrepancyReport:
    value: object
    values: dict
    exact: bool
    K: int
    argmax: tuple = None

    def to_json(self) -> str:
        return json.dumps({
            "K": self.K,
            "discrepancy": str(self.value),
            "discrepancy_float": float(self.value),
            "exact": self.exact,
            "argmax": list(self.argmax) if self.argmax else None,
            "values": {f"{k[0]},{k[1]}": v.to_json() for k, v in self.values.items()},
        }, indent=2)


def _as_mpf(x):
    if isinstance(x, Fraction):
        with mpmath.workprec(MP_BITS):
            return mpmath.mpf(x.numerator) / x.denominator
    return x


def discrepancy(mu: EmpiricalMeasure, K: int) -> DiscrepancyReport:
    """``D_K = max_{0 < |k| <= K} |integral of character k|`` (reference integrals are 0)."""
    if K < 1:
        raise ValueError("frequency cutoff K must be >= 1")
    values = {}
    best, arg = Fraction(0), None
    exact = True
    for k in frequencies(K, mu.space == SPHERE):
        v = character_integral(mu, k)
        values[k] = v
        exact = exact and v.exact
        a = abs(v)
        if arg is None or _as_mpf(a) > _as_mpf(best):
            best, arg = a, k
    return DiscrepancyReport(best, values, exact, K, arg)


def invariant_form(A: IntMatrix2, k) -> int:
    """``Q(k) = det[k; kA]``; ``Q(k M) = det(M) Q(k)`` for every ``M`` commuting with ``A``."""
    k1, k2 = k
    r1 = k1 * A.a + k2 * A.c
    r2 = k1 * A.b + k2 * A.d
    return k1 * r2 - k2 * r1


@dataclass
class WeakStarCertificate:
    """Proof that no ``0 < |k| <= K`` annihilates ``P_n`` (resp. ``P_n^-``) for any ``n >= n_start``.

    A nonzero ``k`` in the dual lattice ``Z^2 (A^n -+ I)`` has
    ``|Q(k)| >= trace(A^n) -+ 2``.  Past ``n_bound`` that exceeds ``q_max``
    (the largest ``|Q|`` on the frequency box), so only ``n_start..n_bound``
    need the explicit check, recorded in ``checked``.
    """

    K: int
    kind: str
    n_start: int
    q_max: int
    n_bound: int
    checked: dict
    holds: bool


def weak_star_certificate(A: IntMatrix2, K: int, n_start: int, kind: str = "periodic") -> WeakStarCertificate:
    sign = -1 if kind == "periodic" else 1
    ks = frequencies(K, False)
    q_max = max(abs(invariant_form(A, k)) for k in ks)
    n = n_start
    checked = {}
    while True:
        t = mat_pow(A, n).trace
        if t + 2 * sign > q_max:
            n_bound = n
            break
        pset_gens = _dual_generators(A, n, sign)
        checked[n] = [k for k in ks if character_trivial_on(k, pset_gens)]
        n += 1
    holds = all(not v for v in checked.values())
    return WeakStarCertificate(K, kind, n_start, q_max, n_bound, checked, holds)


def _dual_generators(A: IntMatrix2, n: int, sign: int) -> tuple:
    """SNF generators of ``P_n`` (sign -1) or ``P_n^-`` (sign +1), without enumerating the group."""
    M = mat_pow(A, n) + (IntMatrix2.identity() if sign > 0 else -IntMatrix2.identity())
    snf = smith_normal_form(M)
    V = snf.V
    return ((Fraction(V.a, snf.d1) % 1, Fraction(V.c, snf.d1) % 1),
            (Fraction(V.b, snf.d2) % 1, Fraction(V.d, snf.d2) % 1))


def sphere_character_closed_form(A: IntMatrix2, n: int, k) -> Fraction:
    """``int cos(2 pi k.x) d mu_n`` on the sphere from the torus dual lattices alone.

    ``(Per_n [k annihilates P_n] + Per_n^- [k annihilates P_n^-]) / (2 trace(A^n))``.
    """
    t = mat_pow(A, n).trace
    a = (t - 2) if character_trivial_on(k, _dual_generators(A, n, -1)) else 0
    b = (t + 2) if character_trivial_on(k, _dual_generators(A, n, 1)) else 0
    return Fraction(a + b, 2 * t)


# --------------------------------------------------------------------------
# Bowen balls


@dataclass(frozen=True)
class BowenBall:
    """``B_n(x, eps) = {y : d(f^k y, f^k x) <= eps for 0 <= k < n}``."""

    center: object
    n: int
    radius: Fraction

    def contains(self, A: IntMatrix2, y) -> bool:
        x = self.center
        sphere = isinstance(x, SpherePoint)
        dist = sphere_metric if sphere else torus_dist
        step = (lambda p: sphere_apply(A, p)) if sphere else (lambda p: apply(A, p))
        for _ in range(self.n):
            if dist(x, y) > self.radius:
                return False
            x, y = step(x), step(y)
        return True


def ball_mass(mu: EmpiricalMeasure, ball: BowenBall, A: IntMatrix2) -> Fraction:
    """Exact measure of a Bowen ball, deciding membership atom by atom."""
    return sum((w for p, w in mu.atoms.items() if ball.contains(A, p)), Fraction(0))


def _ball_counts(A: IntMatrix2, nums: np.ndarray, den: int, centers: np.ndarray, cden: int,
                 n_values: Sequence[int], eps: Fraction, sphere: bool) -> np.ndarray:
    """Vectorised Bowen-ball counts: ``out[c, j]`` atoms within ``eps`` of center ``c`` for ``n_values[j]`` steps."""
    L = math.lcm(den, cden)
    if L * (abs(A.a) + abs(A.b) + abs(A.c) + abs(A.d)) >= 2**62:
        raise OverflowError("common denominator too large for the vectorised Bowen-ball path")
    P = (nums.astype(np.int64) * (L // den)) % L
    C = (centers.astype(np.int64) * (L // cden)) % L
    n_max = max(n_values)
    alive = np.ones((len(C), len(P)), dtype=bool)
    out = np.zeros((len(C), len(n_values)), dtype=np.int64)
    thresh_num, thresh_den = eps.numerator, eps.denominator

    def close(diff):
        d = diff % L
        d = np.minimum(d, L - d)
        return d * thresh_den <= thresh_num * L

    for step in range(n_max):
        dx = P[None, :, 0] - C[:, None, 0]
        dy = P[None, :, 1] - C[:, None, 1]
        ok = close(dx) & close(dy)
        if sphere:
            sx = -P[None, :, 0] - C[:, None, 0]
            sy = -P[None, :, 1] - C[:, None, 1]
            ok |= close(sx) & close(sy)
        alive &= ok
        for j, n in enumerate(n_values):
            if n == step + 1:
                out[:, j] = alive.sum(axis=1)
        P = np.stack([(A.a * P[:, 0] + A.b * P[:, 1]) % L, (A.c * P[:, 0] + A.d * P[:, 1]) % L], axis=1)
        C = np.stack([(A.a * C[:, 0] + A.b * C[:, 1]) % L, (A.c * C[:, 0] + A.d * C[:, 1]) % L], axis=1)
    return out


def _as_integer_points(points) -> tuple:
    reps = [p.rep if isinstance(p, SpherePoint) else p for p in points]
    den = math.lcm(*(p.denominator for p in reps)) if reps else 1
    nums = np.array([[int(p.x * den), int(p.y * den)] for p in reps], dtype=np.int64).reshape(-1, 2)
    return den, nums


@dataclass
class HomogeneityTable:
    r: int
    eps: Fraction
    variant: str
    n_values: list
    centers: list
    masses: np.ndarray  # rows: centers, cols: n
    normalized: np.ndarray
    ratios: list
    zero_flags: list

    @property
    def ratio_spread(self) -> float:
        finite = [x for x in self.ratios if np.isfinite(x)]
        return max(finite) / min(finite) if finite else float("inf")

    def to_rows(self) -> list:
        rows = []
        for j, n in enumerate(self.n_values):
            col = self.normalized[:, j]
            nz = col[col > 0]
            rows.append({"n": n, "min": float(nz.min()) if nz.size else 0.0,
                         "max": float(nz.max()) if nz.size else 0.0,
                         "ratio": self.ratios[j], "empty_balls": int(self.zero_flags[j])})
        return rows


def homogeneity_probe(A: IntMatrix2, r: int, n_values: Sequence[int], eps, n_centers: int = 50,
                      seed: int = 0, variant: str = "torus_starred", center_den: int = 1000) -> HomogeneityTable:
    """Normalised Bowen-ball masses ``e^(h n) mu_r(B_n(x, eps))`` over seeded random centers.

    ``variant`` picks the measure: ``torus`` (uniform on ``P_r``),
    ``torus_starred`` (``P*_r(f_A)``) or ``sphere_starred`` (``P*_r(g_A)``).
    Empty balls are recorded and left out of the max/min ratio.
    """
    eps = Fraction(eps)
    if r <= max(n_values):
        raise ValueError("need r > n for every probed depth")
    sphere = variant.startswith("sphere")
    space = SPHERE if sphere else TORUS
    starred = variant.endswith("starred")
    mu = periodic_measure(A, r, space, starred)
    den, nums = _as_integer_points(mu.atoms.keys())
    rng = random.Random(seed)
    cnums = np.array([[rng.randrange(center_den), rng.randrange(center_den)] for _ in range(n_centers)],
                     dtype=np.int64)
    counts = _ball_counts(A, nums, den, cnums, center_den, list(n_values), eps, sphere)
    masses = counts / len(mu)
    h = quad_eigen(A).log_lambda
    normalized = masses * np.exp(h * np.asarray(n_values, dtype=float))[None, :]
    ratios, zeros = [], []
    for j in range(len(n_values)):
        col = normalized[:, j]
        nz = col[col > 0]
        zeros.append(int((col == 0).sum()))
        ratios.append(float(nz.max() / nz.min()) if nz.size else float("inf"))
    centers = [TorusPoint(Fraction(int(a), center_den), Fraction(int(b), center_den)) for a, b in cnums]
    return HomogeneityTable(r, eps, variant, list(n_values), centers, masses, normalized, ratios, zeros)
