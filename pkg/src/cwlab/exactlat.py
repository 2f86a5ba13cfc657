"""Exact 2x2 integer lattice algebra and real quadratic field arithmetic.

Everything here is exact: integers are Python ints (unbounded) and field
elements ``p + q*sqrt(disc)`` carry rational ``p`` and ``q``.  The eigenvalues
of a hyperbolic matrix in SL(2, Z) live in such a field, which is what lets the
rest of the package split vectors into stable and unstable parts without any
floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from numbers import Rational
from typing import Tuple, Union

import mpmath

Scalar = Union[int, Fraction, "QuadNumber"]
Vec2 = Tuple[Scalar, Scalar]


def _is_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


@total_ordering
class QuadNumber:
    """Element ``p + q*sqrt(disc)`` of the real quadratic field Q(sqrt(disc))."""

    __slots__ = ("p", "q", "disc")

    def __init__(self, p, q=0, disc: int = 5):
        if disc <= 0 or _is_square(disc):
            raise ValueError(f"discriminant must be a positive non-square, got {disc}")
        self.p = Fraction(p)
        self.q = Fraction(q)
        self.disc = int(disc)

    # -- coercion ---------------------------------------------------------
    def _coerce(self, other) -> "QuadNumber":
        if isinstance(other, QuadNumber):
            if other.disc != self.disc:
                if other.q == 0:
                    return QuadNumber(other.p, 0, self.disc)
                raise ValueError(
                    f"cannot mix Q(sqrt({self.disc})) and Q(sqrt({other.disc}))"
                )
            return other
        if isinstance(other, (int, Rational)):
            return QuadNumber(other, 0, self.disc)
        return NotImplemented

    def conjugate(self) -> "QuadNumber":
        return QuadNumber(self.p, -self.q, self.disc)

    def norm(self) -> Fraction:
        """Field norm ``p^2 - disc*q^2``."""
        return self.p * self.p - self.disc * self.q * self.q

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadNumber(self.p + o.p, self.q + o.q, self.disc)

    __radd__ = __add__

    def __neg__(self):
        return QuadNumber(-self.p, -self.q, self.disc)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadNumber(self.p - o.p, self.q - o.q, self.disc)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadNumber(
            self.p * o.p + self.disc * self.q * o.q,
            self.p * o.q + self.q * o.p,
            self.disc,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadNumber":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in quadratic field")
        return QuadNumber(self.p / n, -self.q / n, self.disc)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = QuadNumber(1, 0, self.disc)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __floor__(self) -> int:
        digits = len(str(int(abs(self.p)) + int(abs(self.q)) * (self.disc + 1)))
        with mpmath.workdps(digits + 20):
            guess = int(mpmath.floor(self.to_mpf(digits + 20)))
        # the float guess can be off by one near integers; settle it exactly
        while self < guess:
            guess -= 1
        while self >= guess + 1:
            guess += 1
        return guess

    def __ceil__(self) -> int:
        return -math.floor(-self)

    # -- ordering ---------------------------------------------------------
    def sign(self) -> int:
        """Exact sign, decided by rational comparison after squaring."""
        sp = (self.p > 0) - (self.p < 0)
        sq = (self.q > 0) - (self.q < 0)
        if sq == 0:
            return sp
        if sp == 0 or sp == sq:
            return sq
        return sp if self.p * self.p > self.disc * self.q * self.q else sq

    def is_zero(self) -> bool:
        return self.p == 0 and self.q == 0

    def is_rational(self) -> bool:
        return self.q == 0

    def __eq__(self, other):
        if isinstance(other, QuadNumber):
            if other.disc != self.disc:
                return self.q == 0 and other.q == 0 and self.p == other.p
            return self.p == other.p and self.q == other.q
        if isinstance(other, (int, Rational)):
            return self.q == 0 and self.p == other
        return NotImplemented

    def __lt__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return (self - o).sign() < 0

    def __hash__(self):
        if self.q == 0:
            return hash(self.p)
        return hash((self.p, self.q, self.disc))

    # -- conversion -------------------------------------------------------
    def __float__(self) -> float:
        return float(self.to_mpf(30))

    def to_mpf(self, dps: int = 50):
        """High-precision value, free of cancellation when p and q*sqrt(disc) nearly cancel."""
        with mpmath.workdps(dps + 10):
            p = mpmath.mpf(self.p.numerator) / self.p.denominator
            q = mpmath.mpf(self.q.numerator) / self.q.denominator
            root = mpmath.sqrt(self.disc)
            if self.p * self.q < 0:
                # p + q r = norm / (p - q r); the denominator has no cancellation
                n = self.norm()
                value = (mpmath.mpf(n.numerator) / n.denominator) / (p - q * root)
            else:
                value = p + q * root
        return value

    def __repr__(self):
        return f"QuadNumber({self.p}, {self.q}, disc={self.disc})"

    def __str__(self):
        if self.q == 0:
            return str(self.p)
        sign = "+" if self.q > 0 else "-"
        return f"{self.p} {sign} {abs(self.q)}*sqrt({self.disc})"


@dataclass(frozen=True)
class IntMatrix2:
    """Row-major 2x2 integer matrix ``[[a, b], [c, d]]``."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            if not isinstance(getattr(self, name), int):
                raise TypeError(f"entry {name} must be an int")

    @classmethod
    def identity(cls) -> "IntMatrix2":
        return cls(1, 0, 0, 1)

    @classmethod
    def parse(cls, text: str) -> "IntMatrix2":
        """Parse the four-integer literal ``"a b c d"`` (commas also accepted)."""
        parts = text.replace(",", " ").split()
        if len(parts) != 4:
            raise ValueError(f"matrix literal needs four integers, got {text!r}")
        try:
            return cls(*(int(p) for p in parts))
        except ValueError as exc:
            raise ValueError(f"bad matrix literal {text!r}") from exc

    def to_text(self) -> str:
        return f"{self.a} {self.b} {self.c} {self.d}"

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> int:
        return self.a + self.d

    def rows(self):
        return ((self.a, self.b), (self.c, self.d))

    def __matmul__(self, other):
        if isinstance(other, IntMatrix2):
            return IntMatrix2(
                self.a * other.a + self.b * other.c,
                self.a * other.b + self.b * other.d,
                self.c * other.a + self.d * other.c,
                self.c * other.b + self.d * other.d,
            )
        x, y = other
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def __add__(self, other: "IntMatrix2") -> "IntMatrix2":
        return IntMatrix2(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d)

    def __sub__(self, other: "IntMatrix2") -> "IntMatrix2":
        return IntMatrix2(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d)

    def __neg__(self) -> "IntMatrix2":
        return IntMatrix2(-self.a, -self.b, -self.c, -self.d)

    def transpose(self) -> "IntMatrix2":
        return IntMatrix2(self.a, self.c, self.b, self.d)

    def inverse(self) -> "IntMatrix2":
        """Integer inverse; only defined for unimodular matrices."""
        det = self.det
        if det not in (1, -1):
            raise ValueError("only unimodular integer matrices have integer inverses")
        return IntMatrix2(self.d * det, -self.b * det, -self.c * det, self.a * det)

    def is_zero(self) -> bool:
        return self.a == self.b == self.c == self.d == 0

    def check_hyperbolic(self) -> None:
        """Raise unless det = 1 and trace > 2 (both eigenvalues positive, one > 1)."""
        if self.det != 1:
            raise ValueError(f"matrix {self.to_text()} has det {self.det}; need det = 1")
        if self.trace <= 2:
            raise ValueError(
                f"matrix {self.to_text()} has trace {self.trace}; need trace > 2 "
                "(trace < -2 is reducible to this case by squaring, not supported)"
            )


CAT_MAP = IntMatrix2(2, 1, 1, 1)


def mat_pow(A: IntMatrix2, n: int) -> IntMatrix2:
    """Exact ``A**n`` for ``n >= 0`` by repeated squaring."""
    if n < 0:
        raise ValueError("mat_pow needs n >= 0")
    result = IntMatrix2.identity()
    base = A
    while n:
        if n & 1:
            result = result @ base
        base = base @ base
        n >>= 1
    return result


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``x*a + y*b = g = gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


@dataclass(frozen=True)
class SNFDecomposition:
    """``U @ M @ V == diag(d1, d2)`` with ``U``, ``V`` unimodular and ``d1 | d2``."""

    U: IntMatrix2
    V: IntMatrix2
    d1: int
    d2: int

    @property
    def D(self) -> IntMatrix2:
        return IntMatrix2(self.d1, 0, 0, self.d2)


def smith_normal_form(M: IntMatrix2) -> SNFDecomposition:
    """Smith normal form of a nonzero 2x2 integer matrix.

    The elimination order is fixed (pivot at (0, 0), clear column then row,
    repair divisibility by folding row 1 into row 0), so the output is
    deterministic for a given input.  ``d1 > 0`` and ``d2 >= 0``; ``d2`` is zero
    only for singular ``M``.
    """
    if M.is_zero():
        raise ValueError("smith_normal_form: zero matrix has no meaningful decomposition")

    m = [[M.a, M.b], [M.c, M.d]]
    U = [[1, 0], [0, 1]]
    V = [[1, 0], [0, 1]]

    def row_op(T, A):
        # A <- T @ A for 2x2 lists
        return [
            [T[0][0] * A[0][0] + T[0][1] * A[1][0], T[0][0] * A[0][1] + T[0][1] * A[1][1]],
            [T[1][0] * A[0][0] + T[1][1] * A[1][0], T[1][0] * A[0][1] + T[1][1] * A[1][1]],
        ]

    def col_op(A, T):
        # A <- A @ T
        return [
            [A[0][0] * T[0][0] + A[0][1] * T[1][0], A[0][0] * T[0][1] + A[0][1] * T[1][1]],
            [A[1][0] * T[0][0] + A[1][1] * T[1][0], A[1][0] * T[0][1] + A[1][1] * T[1][1]],
        ]

    swap = [[0, 1], [1, 0]]
    if m[0][0] == 0:
        if m[1][0] != 0:
            m, U = row_op(swap, m), row_op(swap, U)
        elif m[0][1] != 0:
            m, V = col_op(m, swap), col_op(V, swap)
        else:  # only m[1][1] is nonzero
            m, U = row_op(swap, m), row_op(swap, U)
            m, V = col_op(m, swap), col_op(V, swap)

    while True:
        while m[1][0] != 0 or m[0][1] != 0:
            # exact division is handled separately: egcd may return x = 0 there,
            # and the row and column steps would then undo each other forever
            if m[1][0] != 0:
                if m[1][0] % m[0][0] == 0:
                    T = [[1, 0], [-(m[1][0] // m[0][0]), 1]]
                else:
                    g, x, y = _egcd(m[0][0], m[1][0])
                    T = [[x, y], [-m[1][0] // g, m[0][0] // g]]
                m, U = row_op(T, m), row_op(T, U)
            if m[0][1] != 0:
                if m[0][1] % m[0][0] == 0:
                    T = [[1, -(m[0][1] // m[0][0])], [0, 1]]
                else:
                    g, x, y = _egcd(m[0][0], m[0][1])
                    T = [[x, -m[0][1] // g], [y, m[0][0] // g]]
                m, V = col_op(m, T), col_op(V, T)
        if m[1][1] % m[0][0] == 0:
            break
        fold = [[1, 1], [0, 1]]
        m, U = row_op(fold, m), row_op(fold, U)

    if m[0][0] < 0:
        neg = [[-1, 0], [0, 1]]
        m, U = row_op(neg, m), row_op(neg, U)
    if m[1][1] < 0:
        neg = [[1, 0], [0, -1]]
        m, U = row_op(neg, m), row_op(neg, U)

    return SNFDecomposition(
        U=IntMatrix2(U[0][0], U[0][1], U[1][0], U[1][1]),
        V=IntMatrix2(V[0][0], V[0][1], V[1][0], V[1][1]),
        d1=m[0][0],
        d2=m[1][1],
    )


@dataclass(frozen=True)
class EigenData:
    """Exact eigen-decomposition of a hyperbolic ``A`` in SL(2, Z).

    ``basis`` has columns ``v_u`` and ``v_s``; ``basis_inv`` maps plane
    coordinates to eigen-coordinates ``(c_u, c_s)``.
    """

    A: IntMatrix2
    lam: QuadNumber
    lam_inv: QuadNumber
    v_u: tuple
    v_s: tuple
    basis: tuple
    basis_inv: tuple

    @property
    def disc(self) -> int:
        return self.lam.disc

    @property
    def log_lambda(self) -> float:
        return float(mpmath.log(self.lam.to_mpf(40)))

    def to_eigen(self, v) -> tuple:
        """Eigen-coordinates ``(c_u, c_s)`` of a plane vector."""
        (r00, r01), (r10, r11) = self.basis_inv
        x, y = v
        return (r00 * x + r01 * y, r10 * x + r11 * y)

    def from_eigen(self, cu, cs) -> tuple:
        return (
            self.v_u[0] * cu + self.v_s[0] * cs,
            self.v_u[1] * cu + self.v_s[1] * cs,
        )

    def distortion(self) -> QuadNumber:
        """Eigenbasis distortion ``kappa_B = max(|v_u|, |v_s|) * ||B^-1||`` in sup norms."""
        vmax = max(max(abs(c) for c in self.v_u), max(abs(c) for c in self.v_s))
        inv_norm = max(abs(r[0]) + abs(r[1]) for r in self.basis_inv)
        return vmax * inv_norm

    def shadowing_constant(self) -> QuadNumber:
        """``C = kappa_B * (1/(lambda - 1) + 1/(1 - 1/lambda))``, the linear shadowing gain."""
        one = QuadNumber(1, 0, self.disc)
        return self.distortion() * ((self.lam - one).inverse() + (one - self.lam_inv).inverse())


def quad_eigen(A: IntMatrix2) -> EigenData:
    A.check_hyperbolic()
    t = A.trace
    disc = t * t - 4
    root = QuadNumber(0, 1, disc)
    lam = (QuadNumber(t, 0, disc) + root) / 2
    lam_inv = (QuadNumber(t, 0, disc) - root) / 2
    # b != 0 for every hyperbolic SL(2, Z) matrix: b = 0 forces a*d = 1, |trace| <= 2.
    if A.b != 0:
        v_u = (QuadNumber(1, 0, disc), (lam - A.a) / A.b)
        v_s = (QuadNumber(1, 0, disc), (lam_inv - A.a) / A.b)
    else:
        v_u = ((lam - A.d) / A.c, QuadNumber(1, 0, disc))
        v_s = ((lam_inv - A.d) / A.c, QuadNumber(1, 0, disc))
    basis = ((v_u[0], v_s[0]), (v_u[1], v_s[1]))
    det = basis[0][0] * basis[1][1] - basis[0][1] * basis[1][0]
    inv_det = det.inverse()
    basis_inv = (
        (basis[1][1] * inv_det, -basis[0][1] * inv_det),
        (-basis[1][0] * inv_det, basis[0][0] * inv_det),
    )
    return EigenData(A, lam, lam_inv, v_u, v_s, basis, basis_inv)
