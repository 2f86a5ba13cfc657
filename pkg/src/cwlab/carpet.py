"""Blow-up of finitely many periodic orbits of the sphere map into circles.

Each point of a blown orbit is replaced by the circle of tangent rays at
that point.  The map on circles is the projectivised differential: a ray
moves by the linear action of ``A`` along the chosen torus lifts of the
orbit.  When the lift closes up antipodally (``f^n x = -x``) the step that
closes the orbit acts by ``-A`` instead.

Carpet points are stored by their determining coordinate, a base sphere
point or a circle datum ``(orbit, position, ray)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .exactlat import IntMatrix2, QuadNumber, _is_square, mat_pow, quad_eigen
from .measures import SPHERE, AtomTerm, EmpiricalMeasure, GroupTerm, _dual_generators, discrepancy
from .sphere import SpherePoint, sphere_apply, sphere_metric, sphere_periodic_points
from .toral import TorusPoint, apply, grid

UNIFORM = "uniform"
ANTIPODAL_MODE = "antipodal"
LIFT_PERIODIC = "periodic"
LIFT_ANTIPODAL = "antipodal"
MAX_ORBIT_PERIOD = 256


# --------------------------------------------------------------------------
# rays in the tangent plane


@dataclass(frozen=True)
class Ray:
    """Oriented tangent direction: ``sign * (1, slope)``, or ``sign * (0, 1)`` when ``slope`` is None."""

    slope: Optional[QuadNumber]
    sign: int

    def vector(self):
        if self.slope is None:
            return (0, self.sign)
        return (self.sign, self.sign * self.slope)

    def __repr__(self):
        return f"Ray({'vertical' if self.slope is None else self.slope}, {'+' if self.sign > 0 else '-'})"


def ray_from_vector(vx, vy) -> Ray:
    vx = vx if isinstance(vx, QuadNumber) else QuadNumber(vx)
    vy = vy if isinstance(vy, QuadNumber) else QuadNumber(vy)
    if vx.is_zero():
        if vy.is_zero():
            raise ValueError("zero vector has no direction")
        return Ray(None, vy.sign())
    return Ray(vy / vx, vx.sign())


def act_on_ray(M: IntMatrix2, r: Ray) -> Ray:
    x, y = r.vector()
    x = x if isinstance(x, QuadNumber) else QuadNumber(x)
    y = y if isinstance(y, QuadNumber) else QuadNumber(y)
    return ray_from_vector(M.a * x + M.b * y, M.c * x + M.d * y)


def fixed_rays(M: IntMatrix2, disc: Optional[int] = None) -> list:
    """Rays fixed by ``M``: eigen-directions whose eigenvalue is positive.

    For ``M = A^m`` these are exactly ``+-v_u`` and ``+-v_s``; for ``M = -A^m``
    none are fixed (the eigenvalues are negative, so each ray is reversed).
    ``disc`` names the quadratic field to express slopes in; the discriminant
    of ``M`` must be a square multiple of it.
    """
    a, b, c, d = M.a, M.b, M.c, M.d
    if b == 0:
        raise ValueError("fixed_rays expects a matrix with nonzero upper-right entry")
    own = (a - d) ** 2 + 4 * b * c
    disc = own if disc is None else disc
    if disc <= 0 or _is_square(disc) or own % disc or not _is_square(own // disc):
        raise ValueError("fixed_rays expects a hyperbolic matrix in the given quadratic field")
    f = math.isqrt(own // disc)
    out = []
    # slope s fixed projectively: b s^2 + (a - d) s - c = 0
    for root_sign in (1, -1):
        s = QuadNumber(Fraction(d - a, 2 * b), Fraction(root_sign * f, 2 * b), disc)
        for sign in (1, -1):
            r = Ray(s, sign)
            if act_on_ray(M, r) == r:
                out.append(r)
    return out


def eigen_rays(A: IntMatrix2) -> dict:
    """``{'+u', '-u', '+s', '-s'}`` mapped to rays along the eigenvectors."""
    eig = quad_eigen(A)
    return {
        "+u": ray_from_vector(*eig.v_u),
        "-u": ray_from_vector(-eig.v_u[0], -eig.v_u[1]),
        "+s": ray_from_vector(*eig.v_s),
        "-s": ray_from_vector(-eig.v_s[0], -eig.v_s[1]),
    }


# --------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class BlownOrbit:
    """A periodic ``g_A``-orbit; ``lifts[i] = f^i(lifts[0])`` on the torus."""

    base: SpherePoint
    period: int
    lifts: tuple
    lift_type: str

    @property
    def positions(self) -> tuple:
        return tuple(SpherePoint(x) for x in self.lifts)


@dataclass
class ValidationReport:
    ok: bool
    violations: list
    spine_free: bool
    distinct_periods: bool
    disjoint: bool
    genuine_orbits: bool
    density: str
    covering_radius: Optional[Fraction] = None

    def to_json(self) -> str:
        return json.dumps({
            "ok": self.ok,
            "violations": self.violations,
            "spine_free": self.spine_free,
            "distinct_periods": self.distinct_periods,
            "disjoint": self.disjoint,
            "genuine_orbits": self.genuine_orbits,
            "density": self.density,
            "covering_radius": None if self.covering_radius is None else str(self.covering_radius),
        }, indent=2)


class RegistryError(ValueError):
    def __init__(self, report: ValidationReport):
        super().__init__("; ".join(report.violations))
        self.report = report


@dataclass(frozen=True)
class BlowupRegistry:
    A: IntMatrix2
    orbits: tuple
    report: ValidationReport = field(compare=False)

    def __len__(self):
        return len(self.orbits)

    @property
    def periods(self) -> list:
        return [o.period for o in self.orbits]

    def locate(self, s: SpherePoint):
        """``(orbit index, position)`` of a blown sphere point, or None."""
        return self._index.get(s)

    @property
    def _index(self) -> dict:
        cached = self.__dict__.get("_idx")
        if cached is None:
            cached = {p: (k, i) for k, o in enumerate(self.orbits) for i, p in enumerate(o.positions)}
            object.__setattr__(self, "_idx", cached)
        return cached

    def to_text(self) -> str:
        return "".join(o.base.to_text() + "\n" for o in self.orbits)


def _trace_orbit(A: IntMatrix2, s: SpherePoint):
    x = s.rep
    lifts = [x]
    y = apply(A, x)
    while len(lifts) <= MAX_ORBIT_PERIOD:
        if y == x or y == -x:
            kind = LIFT_PERIODIC if y == x else LIFT_ANTIPODAL
            return BlownOrbit(s, len(lifts), tuple(lifts), kind)
        lifts.append(y)
        y = apply(A, y)
    return None


def covering_radius(points: Sequence[SpherePoint], mesh: int = 20) -> Fraction:
    """Largest sphere distance from a mesh-``1/mesh`` sample to the nearest of ``points``."""
    if not points:
        return Fraction(1, 2)
    worst = Fraction(0)
    for g in grid(mesh):
        s = SpherePoint(g)
        worst = max(worst, min(sphere_metric(s, p) for p in points))
    return worst


def validate_registry(A: IntMatrix2, bases: Sequence, density_mesh: int = 20) -> ValidationReport:
    """Exact checks of a finite registry; the density conditions are only sampled."""
    A.check_hyperbolic()
    bases = [b if isinstance(b, SpherePoint) else SpherePoint(b) for b in bases]
    violations = []
    spine_free = distinct = disjoint = genuine = True
    orbits = []
    for b in bases:
        if b.is_spine:
            spine_free = False
            violations.append(f"{b.to_text()}: spine")
            continue
        o = _trace_orbit(A, b)
        if o is None:
            genuine = False
            violations.append(f"{b.to_text()}: no period <= {MAX_ORBIT_PERIOD}")
            continue
        orbits.append(o)
    periods = [o.period for o in orbits]
    if len(set(periods)) != len(periods):
        distinct = False
        violations.append(f"repeated periods {sorted(periods)}")
    seen: dict = {}
    for k, o in enumerate(orbits):
        for p in o.positions:
            if p in seen and seen[p] != k:
                disjoint = False
                violations.append(f"orbits {seen[p]} and {k} share {p.to_text()}")
            seen[p] = k
    radius = covering_radius(list(seen), density_mesh) if density_mesh else None
    density = (f"not finitely verifiable; sampled coverage on mesh 1/{density_mesh} "
               f"reaches radius {radius}" if density_mesh else "not finitely verifiable")
    return ValidationReport(not violations, violations, spine_free, distinct, disjoint, genuine, density, radius)


def make_registry(A: IntMatrix2, bases: Sequence, density_mesh: int = 20) -> BlowupRegistry:
    """Validated registry; raises :class:`RegistryError` listing every violation."""
    report = validate_registry(A, bases, density_mesh)
    if not report.ok:
        raise RegistryError(report)
    orbits = tuple(_trace_orbit(A, b if isinstance(b, SpherePoint) else SpherePoint(b)) for b in bases)
    return BlowupRegistry(A, orbits, report)


def registry_from_periods(A: IntMatrix2, periods: Sequence[int], density_mesh: int = 0) -> BlowupRegistry:
    """One orbit per requested period: the smallest non-spine class of that least period."""
    if len(set(periods)) != len(periods):
        raise ValueError("periods must be pairwise distinct")
    bases = []
    for n in periods:
        for s in sphere_periodic_points(A, n).points:
            if s.is_spine:
                continue
            o = _trace_orbit(A, s)
            if o.period == n:
                bases.append(s)
                break
        else:
            raise ValueError(f"no non-spine orbit of least period {n}")
    return make_registry(A, bases, density_mesh)


def read_registry(A: IntMatrix2, text: str, density_mesh: int = 20) -> BlowupRegistry:
    bases = [SpherePoint(TorusPoint.parse(line.split("#")[0]))
             for line in text.splitlines() if line.split("#")[0].strip()]
    return make_registry(A, bases, density_mesh)


# --------------------------------------------------------------------------
# carpet points and dynamics


@dataclass(frozen=True)
class Base:
    point: SpherePoint


@dataclass(frozen=True)
class Circle:
    orbit: int
    position: int
    ray: Ray


CarpetPoint = Union[Base, Circle]


def _step_matrix(A: IntMatrix2, o: BlownOrbit, i: int, twist: bool) -> IntMatrix2:
    # the closing step maps lifts[-1] to -lifts[0] on antipodal lifts
    if twist and i == o.period - 1 and o.lift_type == LIFT_ANTIPODAL:
        return -A
    return A


def carpet_apply(A: IntMatrix2, reg: BlowupRegistry, p: CarpetPoint, twist: bool = True) -> CarpetPoint:
    """One step of the carpet map.

    ``twist=False`` ignores the antipodal closing sign, which is the
    convention under which every circle periodic point has period ``n_k``.
    """
    if isinstance(p, Base):
        if reg.locate(p.point) is not None:
            raise ValueError(f"{p.point.to_text()} lies on a blown orbit; use a circle point")
        return Base(sphere_apply(A, p.point))
    if not (0 <= p.orbit < len(reg.orbits)):
        raise ValueError("circle point refers to an unknown orbit")
    o = reg.orbits[p.orbit]
    if not (0 <= p.position < o.period):
        raise ValueError("circle position out of range")
    M = _step_matrix(A, o, p.position, twist)
    return Circle(p.orbit, (p.position + 1) % o.period, act_on_ray(M, p.ray))


def project_carpet(reg: BlowupRegistry, p: CarpetPoint) -> SpherePoint:
    """Collapse a carpet point to the sphere (circles go to their centre)."""
    if isinstance(p, Base):
        return p.point
    return reg.orbits[p.orbit].positions[p.position]


def return_matrix(A: IntMatrix2, o: BlownOrbit, twist: bool = True) -> IntMatrix2:
    """Product of the step matrices once around the orbit."""
    M = IntMatrix2.identity()
    for i in range(o.period):
        M = _step_matrix(A, o, i, twist) @ M
    return M


def circle_periodic_rays(A: IntMatrix2, o: BlownOrbit, n: int, twist: bool = True) -> list:
    """Rays at position 0 fixed by ``n`` steps of the circle map (requires ``n_k | n``)."""
    if n % o.period:
        return []
    M = mat_pow(return_matrix(A, o, twist), n // o.period)
    return fixed_rays(M, quad_eigen(A).disc)


def circle_period(A: IntMatrix2, o: BlownOrbit, twist: bool = True) -> int:
    """Least period of the eigen-rays under the circle map."""
    rays = list(eigen_rays(A).values())
    for m in range(1, 5):
        M = mat_pow(return_matrix(A, o, twist), m)
        if all(act_on_ray(M, r) == r for r in rays):
            return m * o.period
    raise AssertionError("eigen-rays failed to return")


# --------------------------------------------------------------------------
# counting and measures


@dataclass
class CarpetCount:
    n: int
    mode: str
    sphere_count: int
    carpet_count: int
    contributions: list  # (orbit index, period, removed base points, added circle points)
    within_square_bound: bool
    dominates_sphere: bool
    dominates_lambda_power: bool

    @property
    def difference(self) -> int:
        return self.carpet_count - self.sphere_count

    def to_json(self) -> dict:
        return {
            "n": self.n, "mode": self.mode,
            "sphere_count": self.sphere_count, "carpet_count": self.carpet_count,
            "contributions": [dict(zip(("orbit", "period", "removed", "added"), c)) for c in self.contributions],
            "within_square_bound": self.within_square_bound,
            "dominates_sphere": self.dominates_sphere,
            "dominates_lambda_power": self.dominates_lambda_power,
        }


def _circle_points(A: IntMatrix2, o: BlownOrbit, n: int, mode: str) -> int:
    rays = circle_periodic_rays(A, o, n, twist=(mode == ANTIPODAL_MODE))
    return o.period * len(rays)


def carpet_periodic_count(A: IntMatrix2, reg: BlowupRegistry, n: int, mode: str = UNIFORM) -> CarpetCount:
    """``Per_n`` of the carpet map, counted orbit by orbit from the circle dynamics.

    In ``uniform`` mode every circle periodic point has the orbit's period; in
    ``antipodal`` mode the closing sign of antipodal lifts is applied, which
    can double the circle period.  The ordering ``carpet >= sphere`` is then
    reported rather than enforced.
    """
    if n < 1:
        raise ValueError("period must be >= 1")
    if mode not in (UNIFORM, ANTIPODAL_MODE):
        raise ValueError(f"unknown mode {mode!r}")
    t = mat_pow(A, n).trace
    total = t
    contributions = []
    for k, o in enumerate(reg.orbits):
        if n % o.period:
            continue
        added = _circle_points(A, o, n, mode)
        total += added - o.period
        contributions.append((k, o.period, o.period, added))
    lam_n = quad_eigen(A).lam ** n
    cc = CarpetCount(n, mode, t, total, contributions,
                     abs(total - t) <= 4 * n * n, total >= t, lam_n <= total)
    if mode == UNIFORM and not (cc.within_square_bound and cc.dominates_sphere and cc.dominates_lambda_power):
        raise AssertionError(f"carpet count certificate failed at n={n}: {cc.to_json()}")
    return cc


def closed_form_count(A: IntMatrix2, periods: Sequence[int], n: int) -> int:
    """``trace(A^n) + 3 * sum of the registry periods dividing n``."""
    return mat_pow(A, n).trace + 3 * sum(p for p in periods if n % p == 0)


def carpet_periodic_measure(A: IntMatrix2, reg: BlowupRegistry, n: int, mode: str = UNIFORM,
                            materialize: bool = True) -> EmpiricalMeasure:
    """Projection to the sphere of the uniform measure on the carpet's period-``n`` points.

    Unblown periodic classes get ``1/Per_n``; a blown position carries its
    circle points' mass ``c/Per_n``.  With ``materialize=False`` only the
    exact character structure is built, so large ``n`` need no enumeration.
    """
    cc = carpet_periodic_count(A, reg, n, mode)
    P = cc.carpet_count
    c = Fraction(1, P)
    terms = [GroupTerm(c / 2, _dual_generators(A, n, -1), mat_pow(A, n).trace - 2),
             GroupTerm(c / 2, _dual_generators(A, n, 1), mat_pow(A, n).trace + 2)]
    heavy = {}
    for k, period, _, added in cc.contributions:
        per_position = Fraction(added, period)
        for s in reg.orbits[k].positions:
            heavy[s] = per_position * c
            terms.append(AtomTerm((per_position - 1) * c, s.rep))
    atoms = {}
    if materialize:
        for s in sphere_periodic_points(A, n).points:
            w = heavy.get(s, c)
            if w:
                atoms[s] = w
    mu = EmpiricalMeasure(SPHERE, atoms, terms, f"carpet nu_{n} projected")
    mu.circle_fraction = sum(heavy.values(), Fraction(0))
    return mu


def circle_mass_fraction(A: IntMatrix2, reg: BlowupRegistry, n: int, mode: str = UNIFORM) -> Fraction:
    cc = carpet_periodic_count(A, reg, n, mode)
    return Fraction(sum(c[3] for c in cc.contributions), cc.carpet_count)


def projected_discrepancy(A: IntMatrix2, reg: BlowupRegistry, n: int, K: int = 3, mode: str = UNIFORM):
    return discrepancy(carpet_periodic_measure(A, reg, n, mode, materialize=False), K)
