"""Separated sets and growth-rate estimates of topological entropy.

All distances are decided exactly: candidates are rational points with a
common denominator ``L``, the map acts on their integer numerators mod ``L``,
and ``d > delta`` is tested as an integer inequality.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exactlat import IntMatrix2, QuadNumber, mat_pow, quad_eigen
from .sphere import SpherePoint
from .toral import TorusPoint, antipodal_periodic_points, grid, periodic_points

TORUS = "torus"
SPHERE = "sphere"
GRID = "grid"
PERIODIC = "periodic"


@dataclass
class SeparationReport:
    n: int
    delta: Fraction
    space: str
    candidates: str
    n_candidates: int
    witness: list
    pairwise_checked: bool = False

    @property
    def s_n_lower(self) -> int:
        return len(self.witness)


def _integer_form(points):
    reps = [p.rep if isinstance(p, SpherePoint) else p for p in points]
    L = math.lcm(*(p.denominator for p in reps)) if reps else 1
    nums = np.array([[int(p.x * L), int(p.y * L)] for p in reps], dtype=np.int64).reshape(-1, 2)
    return L, nums


def _orbits(A: IntMatrix2, nums: np.ndarray, L: int, n: int) -> np.ndarray:
    """``out[j, k] = A^k x_j`` as numerators mod ``L``, shape ``(m, n, 2)``."""
    if L * (abs(A.a) + abs(A.b) + abs(A.c) + abs(A.d)) >= 2**62:
        raise OverflowError("common denominator too large for int64 orbit arithmetic")
    out = np.empty((len(nums), n, 2), dtype=np.int64)
    P = nums % L
    for k in range(n):
        out[:, k] = P
        P = np.stack([(A.a * P[:, 0] + A.b * P[:, 1]) % L, (A.c * P[:, 0] + A.d * P[:, 1]) % L], axis=1)
    return out


def _far(diff: np.ndarray, L: int, delta: Fraction) -> np.ndarray:
    """Circle distance of ``diff / L`` strictly exceeds ``delta`` (elementwise, exact)."""
    d = diff % L
    d = np.minimum(d, L - d)
    return d * delta.denominator > delta.numerator * L


def _separated_from(orbs: np.ndarray, j: int, others: np.ndarray, L: int, delta: Fraction, sphere: bool) -> np.ndarray:
    """For each index in ``others``: is candidate ``j`` (n, delta)-separated from it."""
    o = orbs[others]
    x = orbs[j][None]
    near = ~(_far(o[..., 0] - x[..., 0], L, delta) | _far(o[..., 1] - x[..., 1], L, delta))
    if sphere:
        # quotient metric: close to either lift at a given time
        near |= ~(_far(-o[..., 0] - x[..., 0], L, delta) | _far(-o[..., 1] - x[..., 1], L, delta))
    return (~near).any(axis=1)


def separated_set(A: IntMatrix2, candidates: Sequence, n: int, delta, space: str = TORUS,
                  description: str = "") -> SeparationReport:
    """Greedy maximal ``(n, delta)``-separated subset, scanning candidates in the given order.

    Sphere candidates are SpherePoints (or torus points, which are projected);
    separation then uses the quotient metric.
    """
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if n < 1:
        raise ValueError("n must be >= 1")
    sphere = space == SPHERE
    if sphere:
        candidates = list(dict.fromkeys(c if isinstance(c, SpherePoint) else SpherePoint(c) for c in candidates))
    else:
        candidates = list(candidates)
    L, nums = _integer_form(candidates)
    orbs = _orbits(A, nums, L, n)
    chosen: list[int] = []
    for j in range(len(candidates)):
        if not chosen or _separated_from(orbs, j, np.asarray(chosen), L, delta, sphere).all():
            chosen.append(j)
    return SeparationReport(n, delta, space, description or f"{len(candidates)} candidates",
                            len(candidates), [candidates[j] for j in chosen])


def pairwise_separated(A: IntMatrix2, points: Sequence, n: int, delta, space: str = TORUS) -> list:
    """Every pair that fails ``(n, delta)``-separation; empty means the set is separated."""
    delta = Fraction(delta)
    sphere = space == SPHERE
    L, nums = _integer_form(points)
    orbs = _orbits(A, nums, L, n)
    bad = []
    for j in range(len(points) - 1):
        rest = np.arange(j + 1, len(points))
        sep = _separated_from(orbs, j, rest, L, delta, sphere)
        bad.extend((points[j], points[int(i)]) for i in rest[~sep])
    return bad


def verify_witness(A: IntMatrix2, report: SeparationReport) -> bool:
    """Independent re-check of a report's witness set; sets ``pairwise_checked``."""
    ok = not pairwise_separated(A, report.witness, report.n, report.delta, report.space)
    report.pairwise_checked = ok
    return ok


def separation_certificate(A: IntMatrix2, n_max: int = 8, eps=Fraction(1, 5)) -> dict:
    """Failing pairs of ``P_n`` and ``P_n^-`` under ``(n, eps)``-separation for ``n <= n_max``."""
    out = {}
    for n in range(1, n_max + 1):
        out[(n, "periodic")] = len(pairwise_separated(A, periodic_points(A, n).points, n, eps))
        out[(n, "antipodal")] = len(pairwise_separated(A, antipodal_periodic_points(A, n).points, n, eps))
    return out


@dataclass
class EntropyEstimate:
    slope: float
    intercept: float
    residuals: list
    counts: dict
    scheme: str
    space: str
    delta: Fraction
    degenerate: bool
    reference: float
    reports: list = field(default_factory=list)

    @property
    def relative_error(self) -> float:
        return abs(self.slope - self.reference) / self.reference if self.reference else float("inf")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "delta", "count", "scheme", "space"])
        for n, c in self.counts.items():
            w.writerow([n, str(self.delta), c, self.scheme, self.space])
        return buf.getvalue()


def _fit(ns, counts):
    x = np.asarray(ns, dtype=float)
    y = np.log(np.asarray(counts, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept), (y - (slope * x + intercept)).tolist()


def entropy_estimate(A: IntMatrix2, delta, n_range: Sequence[int], scheme: str = GRID, mesh: int = 60,
                     space: str = TORUS) -> EntropyEstimate:
    """Least-squares slope of ``log s_n(delta)`` against ``n``.

    ``scheme`` ``grid`` scans the rational grid of mesh ``1/mesh``; ``periodic``
    scans the period-``n`` points (on the sphere, ``P_n(g_A)``).  Constant
    counts make the fit degenerate and are flagged.
    """
    n_range = list(n_range)
    if len(n_range) < 4:
        raise ValueError("entropy fit needs at least four depths")
    counts, reports = {}, []
    cands = grid(mesh) if scheme == GRID else None
    for n in n_range:
        if scheme == PERIODIC:
            cands = list(periodic_points(A, n).points)
            if space == SPHERE:
                cands += list(antipodal_periodic_points(A, n).points)
        elif scheme != GRID:
            raise ValueError(f"unknown candidate scheme {scheme!r}")
        rep = separated_set(A, cands, n, delta, space, f"{scheme} n={n}")
        reports.append(rep)
        counts[n] = rep.s_n_lower
    degenerate = len(set(counts.values())) == 1
    slope, intercept, res = _fit(n_range, list(counts.values()))
    ref = _log_lambda(A)
    return EntropyEstimate(slope, intercept, res, counts, scheme, space, Fraction(delta), degenerate, ref, reports)


def _log_lambda(A: IntMatrix2) -> float:
    if A.det == 1 and A.trace > 2:
        return quad_eigen(A).log_lambda
    return 0.0


@dataclass
class GrowthRow:
    n: int
    trace: int
    log_rate: float
    lower_ok: bool
    upper_ok: bool


def periodic_growth(A: IntMatrix2, n_range: Sequence[int]) -> list:
    """``log(Per_n(g_A))/n`` with the exact sandwich ``lambda^n <= trace(A^n) <= 2 lambda^n``.

    ``Per_n(g_A) = trace(A^n) = lambda^n + lambda^-n``, and both comparisons are
    made in the quadratic field.
    """
    eig = quad_eigen(A)
    rows = []
    for n in n_range:
        t = mat_pow(A, n).trace
        lam_n = eig.lam ** n
        rows.append(GrowthRow(n, t, math.log(t) / n, lam_n <= t, QuadNumber(t, 0, eig.disc) <= 2 * lam_n))
    return rows


def first_upper_bound_n(A: IntMatrix2, n_max: int = 64):
    """Smallest ``n`` from which ``trace(A^n) <= 2 lambda^n`` holds through ``n_max`` (``None`` if never)."""
    rows = periodic_growth(A, range(1, n_max + 1))
    first = None
    for r in rows:
        if r.upper_ok and first is None:
            first = r.n
        elif not r.upper_ok:
            first = None
    return first
