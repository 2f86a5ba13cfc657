"""Periodic shadowing and periodic specification for the linear model.

For a hyperbolic ``A`` the periodic correction problem

    w_{i+1} = A w_i - e_i,   w_N = w_0

has a unique solution, found by splitting every jump error ``e_i`` along the
unstable and stable eigenvectors and summing the two geometric series in
opposite time directions.  With rational pseudo-orbit points the corrected
point ``z0 = x_0 + w_0`` is a rational N-periodic point, so the whole solve is
done in exact quadratic-field arithmetic and the irrational parts cancel.
"""

from __future__ import annotations

import json
import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import numpy as np

from .exactlat import EigenData, IntMatrix2, QuadNumber, mat_pow, quad_eigen
from .sphere import SpherePoint, lift_dist, project, sphere_apply, sphere_iterate, sphere_metric
from .toral import TorusPoint, apply, iterate, torus_dist, wrap

log = logging.getLogger(__name__)

TORUS = "torus"
SPHERE = "sphere"
EXACT = "exact"
HIGHPREC = "highprec"

# Half the sup-metric diameter of the torus; a shadowing bound above this says nothing.
BOUND_LIMIT = Fraction(1, 4)
# Minimal-jump lifts of sphere pseudo-orbits are only trusted below this jump size.
SPHERE_LIFT_THRESHOLD = Fraction(1, 4)
# Smallest gap accepted by periodic_specification.
MIN_GAP = 4
HIGHPREC_BITS = 256


def _sup_norm(A: IntMatrix2) -> int:
    return max(abs(A.a) + abs(A.b), abs(A.c) + abs(A.d))


@dataclass
class PseudoOrbit:
    """Finite sequence of points for ``A``; ``periodic`` closes the last jump onto ``points[0]``."""

    A: IntMatrix2
    points: list
    periodic: bool
    space: str = TORUS
    diagnostic: str = ""

    def __len__(self):
        return len(self.points)

    def _dist(self, p, q):
        return torus_dist(p, q) if self.space == TORUS else sphere_metric(p, q)

    def _image(self, p):
        return apply(self.A, p) if self.space == TORUS else sphere_apply(self.A, p)

    @property
    def jump_errors(self) -> list:
        n = len(self.points)
        last = n if self.periodic else n - 1
        return [self._dist(self._image(self.points[i]), self.points[(i + 1) % n]) for i in range(last)]

    @property
    def delta(self) -> Fraction:
        errs = self.jump_errors
        return max(errs) if errs else Fraction(0)

    def to_text(self) -> str:
        head = f"{self.space} {len(self.points)} {'periodic' if self.periodic else 'open'}"
        body = [p.to_text() for p in self.points]
        return "\n".join([head, *body]) + "\n"

    @classmethod
    def from_text(cls, A: IntMatrix2, text: str) -> "PseudoOrbit":
        """Parse the pseudo-orbit file: header ``space N periodic`` then one point per line."""
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not lines:
            raise ValueError("empty pseudo-orbit file")
        head = lines[0].split()
        if len(head) != 3 or head[0] not in (TORUS, SPHERE):
            raise ValueError(f"bad pseudo-orbit header {lines[0]!r}")
        space, n = head[0], int(head[1])
        flag = head[2].lower()
        if flag not in ("periodic", "open", "true", "false", "1", "0"):
            raise ValueError(f"bad periodic flag {head[2]!r}")
        periodic = flag in ("periodic", "true", "1")
        pts = [TorusPoint.parse(ln) for ln in lines[1:]]
        if len(pts) != n:
            raise ValueError(f"header says {n} points, file has {len(pts)}")
        if space == SPHERE:
            pts = [SpherePoint(p) for p in pts]
        return cls(A, pts, periodic, space)


@dataclass
class ShadowResult:
    z0: object
    epsilon: Fraction
    period: int
    certificate: list
    delta: Fraction
    bound: float
    warning: bool = False
    torus_period: Optional[int] = None
    lift_type: str = "periodic"
    mode: str = EXACT
    residual: float = 0.0
    segment_errors: list = field(default_factory=list)

    def to_json(self) -> str:
        z = self.z0
        if isinstance(z, (TorusPoint, SpherePoint)):
            z_text = z.to_text()
        else:
            z_text = " ".join(mpmath.nstr(c, 40) for c in z)
        payload = {
            "z0": z_text,
            "epsilon": str(self.epsilon),
            "epsilon_float": float(self.epsilon),
            "period": self.period,
            "torus_period": self.torus_period,
            "lift_type": self.lift_type,
            "delta": str(self.delta),
            "bound": self.bound,
            "warning": self.warning,
            "mode": self.mode,
            "residual": self.residual,
            "certificate": [str(c) for c in self.certificate],
        }
        if self.segment_errors:
            payload["segment_errors"] = [str(c) for c in self.segment_errors]
        return json.dumps(payload, indent=2)


def _rand_offset(rng: random.Random, scale: Fraction, resolution: int = 1000) -> tuple:
    return (Fraction(rng.randint(-resolution, resolution), resolution) * scale,
            Fraction(rng.randint(-resolution, resolution), resolution) * scale)


def make_pseudo_orbit(A: IntMatrix2, x0: TorusPoint, N: int, noise, seed: int = 0, space: str = TORUS) -> PseudoOrbit:
    """Seeded rational pseudo-orbit of length ``N`` with jumps of sup size at most ``noise``.

    Every step has the form ``points[i+1] = f(points[i]) + eta_i``.  When
    ``x0`` is ``N``-periodic the jumps are produced as ``eta_i = xi_{i+1} - A xi_i``
    for random offsets ``xi`` of size ``noise / (1 + ||A||)`` with ``xi_0 = 0``, so
    the sequence closes up exactly.  Otherwise the ``eta_i`` are drawn directly
    and the closing jump is whatever it is; if it exceeds ``noise`` the orbit is
    returned with ``periodic=False`` and a diagnostic.
    """
    if N < 1:
        raise ValueError("pseudo-orbit length must be >= 1")
    noise = Fraction(noise)
    if noise < 0:
        raise ValueError("noise must be >= 0")
    rng = random.Random(seed)
    diagnostic = ""
    if iterate(A, x0, N) == x0:
        scale = noise / (1 + _sup_norm(A))
        base = x0
        pts = [x0]
        for _ in range(1, N):
            base = apply(A, base)
            pts.append(base + _rand_offset(rng, scale))
        periodic = True
    else:
        pts = [x0]
        for _ in range(1, N):
            pts.append(apply(A, pts[-1]) + _rand_offset(rng, noise))
        closing = torus_dist(apply(A, pts[-1]), x0)
        periodic = closing <= noise
        if not periodic:
            diagnostic = f"closing jump {float(closing):.3g} exceeds noise {float(noise):.3g}"
    if space == SPHERE:
        pts = [project(p) for p in pts]
    return PseudoOrbit(A, pts, periodic, space, diagnostic)


def _geometric_factor(eig: EigenData, N: int) -> tuple:
    r = eig.lam_inv
    powers = [QuadNumber(1, 0, eig.disc)]
    for _ in range(N):
        powers.append(powers[-1] * r)
    wrap_factor = (1 - powers[N]).inverse()
    return powers, wrap_factor


def _jump_lifts(A: IntMatrix2, pts: Sequence[TorusPoint]) -> list:
    n = len(pts)
    errs = []
    for i in range(n):
        p, q = pts[i], pts[(i + 1) % n]
        ax = A.a * p.x + A.b * p.y
        ay = A.c * p.x + A.d * p.y
        errs.append((wrap(q.x - ax), wrap(q.y - ay)))
    return errs


def periodic_correction(eig: EigenData, errs: Sequence[tuple]) -> tuple:
    """Exact ``(u_0, s_0)``: eigen-coordinates of the periodic correction at time 0.

    Unstable part: ``u_0 = sum_k lam^-(k+1) e^u_k / (1 - lam^-N)``.
    Stable part:   ``s_0 = -sum_k lam^-k e^s_{-1-k} / (1 - lam^-N)``.
    """
    N = len(errs)
    coords = [eig.to_eigen(e) for e in errs]
    powers, wrap_factor = _geometric_factor(eig, N)
    zero = QuadNumber(0, 0, eig.disc)
    u0 = zero
    s0 = zero
    for k in range(N):
        u0 = u0 + powers[k + 1] * coords[k][0]
        s0 = s0 + powers[k] * coords[(-1 - k) % N][1]
    return u0 * wrap_factor, -s0 * wrap_factor


def _bound(eig: EigenData, delta: Fraction) -> tuple:
    C = eig.shadowing_constant()
    bound = C * delta
    return float(bound), bound >= BOUND_LIMIT


def shadow_periodic(A: IntMatrix2, po: PseudoOrbit, mode: str = EXACT) -> ShadowResult:
    """Periodic point of period ``len(po)`` shadowing a periodic torus pseudo-orbit.

    The guarantee is ``epsilon <= C * delta`` with ``C`` from
    :meth:`EigenData.shadowing_constant`; ``warning`` is set when that bound is
    no smaller than a quarter of the torus, where it carries no information.
    """
    if po.space != TORUS:
        raise ValueError("shadow_periodic works on torus pseudo-orbits; use shadow_periodic_sphere")
    if not po.periodic:
        raise ValueError("shadow_periodic needs a periodic pseudo-orbit")
    eig = quad_eigen(A)
    pts = po.points
    N = len(pts)
    errs = _jump_lifts(A, pts)
    delta = max(max(abs(e[0]), abs(e[1])) for e in errs)
    bound, warning = _bound(eig, delta)
    if warning:
        log.warning("shadowing bound %.3g is not below 1/4; result is uninformative", bound)
    if mode == HIGHPREC:
        return _shadow_highprec(A, eig, pts, errs, delta, bound, warning)
    if mode != EXACT:
        raise ValueError(f"unknown arithmetic mode {mode!r}")

    u0, s0 = periodic_correction(eig, errs)
    w = eig.from_eigen(u0, s0)
    if not (w[0].is_rational() and w[1].is_rational()):
        raise ArithmeticError("periodic correction did not come out rational")
    z0 = TorusPoint(pts[0].x + w[0].p, pts[0].y + w[1].p)

    cert = []
    z = z0
    for k in range(N):
        cert.append(torus_dist(z, pts[k]))
        z = apply(A, z)
    if z != z0:
        raise ArithmeticError("shadowing point is not N-periodic")
    return ShadowResult(z0=z0, epsilon=max(cert), period=N, certificate=cert, delta=delta,
                        bound=bound, warning=warning, torus_period=N)


def _shadow_highprec(A, eig, pts, errs, delta, bound, warning) -> ShadowResult:
    """Floating 256-bit solve for long orbits; reports the largest one-step residual."""
    N = len(pts)
    with mpmath.workprec(HIGHPREC_BITS):
        lam = eig.lam.to_mpf(90)
        r = 1 / lam
        binv = [[c.to_mpf(90) for c in row] for row in eig.basis_inv]
        vu = [c.to_mpf(90) for c in eig.v_u]
        vs = [c.to_mpf(90) for c in eig.v_s]

        def mp(fr):
            return mpmath.mpf(fr.numerator) / fr.denominator

        eu = [binv[0][0] * mp(e[0]) + binv[0][1] * mp(e[1]) for e in errs]
        es = [binv[1][0] * mp(e[0]) + binv[1][1] * mp(e[1]) for e in errs]
        wrap_f = 1 / (1 - r ** N)
        u = [mpmath.mpf(0)] * N
        s = [mpmath.mpf(0)] * N
        u[0] = wrap_f * mpmath.fsum(r ** (k + 1) * eu[k] for k in range(N))
        s[0] = -wrap_f * mpmath.fsum(r ** k * es[(-1 - k) % N] for k in range(N))
        # u is propagated backwards (u_i = (u_{i+1} + e^u_i)/lam), s forwards; both contract
        u_back = [mpmath.mpf(0)] * (N + 1)
        u_back[N] = u[0]
        for i in range(N - 1, -1, -1):
            u_back[i] = (u_back[i + 1] + eu[i]) * r
        for i in range(1, N):
            s[i] = r * s[i - 1] - es[i - 1]
            u[i] = u_back[i]
        w = [(u[i] * vu[0] + s[i] * vs[0], u[i] * vu[1] + s[i] * vs[1]) for i in range(N)]
        z = [(mp(pts[i].x) + w[i][0], mp(pts[i].y) + w[i][1]) for i in range(N)]
        residual = mpmath.mpf(0)
        for i in range(N):
            zx, zy = z[i]
            nx, ny = z[(i + 1) % N]
            for d in (nx - (A.a * zx + A.b * zy), ny - (A.c * zx + A.d * zy)):
                d = d - mpmath.nint(d)
                residual = max(residual, abs(d))
        cert = [max(abs(wi[0]), abs(wi[1])) for wi in w]
        z0 = (z[0][0] % 1, z[0][1] % 1)
        eps = max(cert)
        return ShadowResult(z0=z0, epsilon=Fraction(str(mpmath.nstr(eps, 40))), period=N,
                            certificate=[Fraction(str(mpmath.nstr(c, 40))) for c in cert],
                            delta=delta, bound=bound, warning=warning, torus_period=N,
                            mode=HIGHPREC, residual=float(residual))


def lift_sphere_orbit(A: IntMatrix2, po: PseudoOrbit) -> tuple:
    """Minimal-jump torus lift of a periodic sphere pseudo-orbit.

    Returns ``(lifted points, lift_type)``.  The lift closes either onto
    ``points[0]`` (``"periodic"``) or onto its antipode (``"antipodal"``); in
    the second case the lift is continued by negation to length ``2N``.
    """
    pts = po.points
    N = len(pts)
    lifted = [pts[0].rep]
    closing = None
    for i in range(N):
        target = apply(A, lifted[-1])
        rep = pts[(i + 1) % N].rep
        neg = -rep
        choice = rep if torus_dist(target, rep) <= torus_dist(target, neg) else neg
        if i < N - 1:
            lifted.append(choice)
        else:
            closing = choice
    if closing == lifted[0]:
        return lifted, "periodic"
    return lifted + [-p for p in lifted], "antipodal"


def shadow_periodic_sphere(A: IntMatrix2, po: PseudoOrbit, mode: str = EXACT) -> ShadowResult:
    """Periodic shadowing on the sphere through the minimal-jump torus lift.

    When the lift closes antipodally the doubled lift has period ``2N`` on the
    torus; its solution satisfies ``f^N(z) = -z``, so the projected point still
    has sphere period ``N``.
    """
    if po.space != SPHERE:
        raise ValueError("shadow_periodic_sphere needs a sphere pseudo-orbit")
    if not po.periodic:
        raise ValueError("shadow_periodic_sphere needs a periodic pseudo-orbit")
    delta = po.delta
    if delta >= SPHERE_LIFT_THRESHOLD:
        raise ValueError(f"sphere jump size {float(delta):.3g} >= 1/4: lift is ambiguous")
    lifted, lift_type = lift_sphere_orbit(A, po)
    torus_po = PseudoOrbit(A, lifted, True, TORUS)
    res = shadow_periodic(A, torus_po, mode=mode)
    N = len(po.points)
    if mode == HIGHPREC:
        res.period = N
        res.lift_type = lift_type
        res.certificate = res.certificate[:N]
        res.epsilon = max(res.certificate)
        return res
    z = SpherePoint(res.z0)
    if sphere_iterate(A, z, N) != z:
        raise ArithmeticError("projected shadowing point is not N-periodic on the sphere")
    cert = []
    s = z
    for k in range(N):
        cert.append(sphere_metric(s, po.points[k]))
        s = sphere_apply(A, s)
    return ShadowResult(z0=z, epsilon=max(cert), period=N, certificate=cert, delta=delta,
                        bound=res.bound, warning=res.warning, torus_period=len(lifted),
                        lift_type=lift_type)


# --------------------------------------------------------------------------
# specification


@dataclass
class Connection:
    """Point ``z`` on the unstable line of ``p_end`` whose ``L``-th image sits on the stable line of ``q_start``."""

    z: tuple
    t: QuadNumber
    s: QuadNumber
    m: tuple
    err_start: QuadNumber
    err_end: QuadNumber
    L: int

    @property
    def error(self) -> float:
        return max(float(self.err_start), float(self.err_end))


@dataclass
class SpecificationRequest:
    """Orbit segments ``(x_j, length_j)`` laid out with gap ``L`` between consecutive ones."""

    segments: list
    L: int

    def layout(self) -> list:
        """``[(a_j, b_j)]`` with ``a_0 = 0`` and ``a_{j+1} = b_j + L``."""
        out = []
        a = 0
        for _, length in self.segments:
            if length < 1:
                raise ValueError("segment length must be >= 1")
            out.append((a, a + length - 1))
            a = a + length - 1 + self.L
        return out

    @property
    def period(self) -> int:
        return self.layout()[-1][1] + self.L


def connection_constant(eig: EigenData) -> float:
    """Documented ``c`` in ``err <= c * lam^(-L/2)`` for :func:`connect_segments`.

    Four times the geometric mean of the two weighted lattice scales; the
    search window guarantees this for the golden-ratio-type lattices met here.
    """
    covol = abs(float(eig.basis_inv[0][0] * eig.basis_inv[1][1] - eig.basis_inv[0][1] * eig.basis_inv[1][0]))
    a = max(abs(float(c)) for c in eig.v_u)
    b = max(abs(float(c)) for c in eig.v_s)
    return 4.0 * math.sqrt(a * b * covol) + 1.0


def _gauss_reduce(b1, b2, T):
    """Lagrange-Gauss reduction; ``T`` tracks integer combinations of the original basis."""
    def dot(u, v):
        return u[0] * v[0] + u[1] * v[1]

    if dot(b1, b1) > dot(b2, b2):
        b1, b2 = b2, b1
        T = [T[1], T[0]]
    while True:
        mu = int(mpmath.nint(dot(b1, b2) / dot(b1, b1)))
        b2 = (b2[0] - mu * b1[0], b2[1] - mu * b1[1])
        T = [T[0], (T[1][0] - mu * T[0][0], T[1][1] - mu * T[0][1])]
        if dot(b2, b2) >= dot(b1, b1):
            return b1, b2, T
        b1, b2 = b2, b1
        T = [T[1], T[0]]


def connect_segments(A: IntMatrix2, p_end: TorusPoint, q_start: TorusPoint, L: int, window: int = 3) -> Connection:
    """Transversal connection of ``W^u(p_end)`` with ``f^-L W^s(q_start)``.

    Solves ``p_end + t v_u + m = A^-L (q_start + s v_s)`` over reals ``t, s``
    and an integer vector ``m``, choosing ``m`` to minimise the sum of the two
    endpoint errors ``|t| |v_u| + |s| |v_s|``.  The search is a closest-vector
    problem in the 2D lattice of eigen-coordinates of ``Z^2``; candidates
    around the Babai point of a Gauss-reduced basis are scored and the window
    doubles if the best one misses the ``c * lam^(-L/2)`` scale.
    """
    if L < 1:
        raise ValueError("gap L must be >= 1")
    eig = quad_eigen(A)
    AinvL = mat_pow(A.inverse(), L) if L > 0 else IntMatrix2.identity()
    qx, qy = AinvL @ (q_start.x, q_start.y)
    base = (Fraction(qx) - p_end.x, Fraction(qy) - p_end.y)
    lam_L = eig.lam_inv ** L
    wu = max(abs(c) for c in eig.v_u)
    ws = max(abs(c) for c in eig.v_s)

    dps = 40 + L
    with mpmath.workdps(dps):
        binv = [[c.to_mpf(dps) for c in row] for row in eig.basis_inv]
        a = wu.to_mpf(dps)
        b = (ws * lam_L).to_mpf(dps)
        bx = mpmath.mpf(base[0].numerator) / base[0].denominator
        by = mpmath.mpf(base[1].numerator) / base[1].denominator
        alpha0 = binv[0][0] * bx + binv[0][1] * by
        beta0 = binv[1][0] * bx + binv[1][1] * by
        g1 = (a * binv[0][0], b * binv[1][0])
        g2 = (a * binv[0][1], b * binv[1][1])
        target = (a * alpha0, b * beta0)
        r1, r2, T = _gauss_reduce(g1, g2, [(1, 0), (0, 1)])
        det = r1[0] * r2[1] - r1[1] * r2[0]
        cx = (target[0] * r2[1] - target[1] * r2[0]) / det
        cy = (r1[0] * target[1] - r1[1] * target[0]) / det
        c0x, c0y = int(mpmath.nint(cx)), int(mpmath.nint(cy))
        limit = connection_constant(eig) * float(eig.lam_inv.to_mpf(30) ** (mpmath.mpf(L) / 2))
        while True:
            best = None
            for i in range(c0x - window, c0x + window + 1):
                for j in range(c0y - window, c0y + window + 1):
                    vx = i * r1[0] + j * r2[0]
                    vy = i * r1[1] + j * r2[1]
                    score = abs(target[0] - vx) + abs(target[1] - vy)
                    if best is None or score < best[0]:
                        best = (score, i, j)
            if best[0] <= limit or window > 64:
                break
            window *= 2
        if best[0] > limit:
            raise ValueError(f"connection search exhausted at window {window}; enlarge the search bound")
        _, i, j = best
        m = (i * T[0][0] + j * T[1][0], i * T[0][1] + j * T[1][1])

    Dm = (base[0] - m[0], base[1] - m[1])
    alpha, beta = eig.to_eigen(Dm)
    t = alpha
    s = -beta * lam_L
    z = (p_end.x + t * eig.v_u[0], p_end.y + t * eig.v_u[1])
    AL = mat_pow(A, L)
    fz = AL @ z
    err_start = torus_dist(z, (p_end.x, p_end.y))
    err_end = torus_dist(fz, (q_start.x, q_start.y))
    return Connection(z=z, t=t, s=s, m=m, err_start=err_start, err_end=err_end, L=L)


def _rationalize(value: QuadNumber, digits: int) -> Fraction:
    if value.is_rational():
        return value.p
    scale = 10 ** digits
    with mpmath.workdps(digits + 30):
        return Fraction(int(mpmath.nint(value.to_mpf(digits + 30) * scale)), scale)


def specification_pseudo_orbit(A: IntMatrix2, req: SpecificationRequest, digits: int = 40) -> tuple:
    """Periodic pseudo-orbit realising ``req``; returns ``(PseudoOrbit, connections)``.

    Segment times carry the true orbit points; each gap is filled with the
    orbit of the exact connecting point, rounded to ``digits`` decimals.
    """
    if req.L < MIN_GAP:
        raise ValueError(f"gap L={req.L} below the supported minimum {MIN_GAP}")
    pts = []
    connections = []
    m = len(req.segments)
    for j, (x, length) in enumerate(req.segments):
        seg = [x]
        for _ in range(length - 1):
            seg.append(apply(A, seg[-1]))
        pts.extend(seg)
        q = req.segments[(j + 1) % m][0]
        conn = connect_segments(A, seg[-1], q, req.L)
        connections.append(conn)
        z = conn.z
        for _ in range(1, req.L):
            z = A @ z
            pts.append(TorusPoint(_rationalize(z[0], digits), _rationalize(z[1], digits)))
    return PseudoOrbit(A, pts, True, TORUS), connections


def periodic_specification(A: IntMatrix2, req: SpecificationRequest) -> ShadowResult:
    """Periodic point of period ``b_m + L`` shadowing every prescribed segment.

    ``certificate`` lists the distances at segment times only (gap times are
    unconstrained); ``segment_errors`` holds the maximum for each segment.
    """
    po, _ = specification_pseudo_orbit(A, req)
    res = shadow_periodic(A, po)
    if res.period != req.period:
        raise ArithmeticError("specification period bookkeeping is off")
    cert = []
    seg_errs = []
    z = res.z0
    orbit_pts = []
    for _ in range(res.period):
        orbit_pts.append(z)
        z = apply(A, z)
    for (a, b) in req.layout():
        errs = [torus_dist(orbit_pts[k], po.points[k]) for k in range(a, b + 1)]
        cert.extend(errs)
        seg_errs.append(max(errs))
    res.certificate = cert
    res.segment_errors = seg_errs
    res.epsilon = max(seg_errs)
    return res


def specification_decay(A: IntMatrix2, p_end: TorusPoint, q_start: TorusPoint, L_values: Sequence[int]) -> dict:
    """Least-squares slope of ``log(connection error)`` against ``L``; expect about ``-log(lam)/2``."""
    errs = [connect_segments(A, p_end, q_start, L).error for L in L_values]
    xs = np.asarray(L_values, dtype=float)
    ys = np.log(np.asarray(errs, dtype=float))
    slope, intercept = np.polyfit(xs, ys, 1)
    eig = quad_eigen(A)
    return {"L": list(L_values), "errors": errs, "slope": float(slope), "intercept": float(intercept),
            "expected": -eig.log_lambda / 2}
