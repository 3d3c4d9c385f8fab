"""Quadratic forms, CM points and the candidate lists on the distinguished loci.

A CM point z = (-b + i sqrt|D|) / (2a) is attached to the primitive form
(a, b, c) with a z^2 + b z + c = 0.  If z is a zero of a form with rational
coefficients, so is every Galois conjugate of j(z); in particular the point
attached to the principal form of discriminant D.  The enumerations below
keep only those points whose principal representative lies on the same locus.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

import mpmath

from .errors import BadDiscriminant, NonConvergence

__all__ = [
    "QuadraticForm", "CMPoint", "SurdPoint", "galois_rep", "reduced_forms",
    "class_number", "enumerate_arc_A", "enumerate_fricke_arc", "enumerate_line_L",
    "enumerate_line_R", "exception_set", "reduce_to_fundamental_domain",
    "form_of_point", "LOCI",
]

LOCI = ("A", "A2", "A3", "L", "R")


@dataclass(frozen=True, order=True)
class QuadraticForm:
    """a z^2 + b z + c with a > 0; ``primitive`` divides out the content."""

    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def primitive(self) -> "QuadraticForm":
        g = gcd(gcd(self.a, self.b), self.c) or 1
        s = -1 if self.a < 0 else 1
        return QuadraticForm(s * self.a // g, s * self.b // g, s * self.c // g)

    @property
    def is_primitive(self) -> bool:
        return gcd(gcd(self.a, self.b), self.c) == 1

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def root(self) -> "SurdPoint":
        """The root in the upper half plane."""
        D = self.disc
        if D >= 0 or self.a <= 0:
            raise BadDiscriminant(f"{self} is not positive definite")
        return SurdPoint(Fraction(-self.b, 2 * self.a), Fraction(-D, 4 * self.a * self.a))

    def __str__(self):
        return f"({self.a},{self.b},{self.c})"


@dataclass(frozen=True, order=True)
class SurdPoint:
    """re + i sqrt(im_sq) with rational real part and rational im^2."""

    re: Fraction
    im_sq: Fraction

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im_sq", Fraction(self.im_sq))
        if self.im_sq <= 0:
            raise ValueError("a point of the upper half plane needs im^2 > 0")

    def to_mpc(self) -> mpmath.mpc:
        return mpmath.mpc(mpmath.mpf(self.re.numerator) / self.re.denominator,
                          mpmath.sqrt(mpmath.mpf(self.im_sq.numerator) / self.im_sq.denominator))

    def abs_sq(self) -> Fraction:
        return self.re * self.re + self.im_sq

    def form(self) -> QuadraticForm:
        # z, zbar are the roots of X^2 - 2 re X + |z|^2
        b, c = -2 * self.re, self.abs_sq()
        a = _lcm(b.denominator, c.denominator)
        return QuadraticForm(a, int(b * a), int(c * a)).primitive()

    def __str__(self):
        f = self.form()
        return _surd(f)


def _surd(f: QuadraticForm) -> str:
    return f"({-f.b}+i*sqrt({-f.disc}))/{2 * f.a}"


def _lcm(x: int, y: int) -> int:
    return x * y // gcd(x, y)


@dataclass(frozen=True)
class CMPoint:
    form: QuadraticForm
    locus: str

    @property
    def D(self) -> int:
        return self.form.disc

    @property
    def point(self) -> SurdPoint:
        return self.form.root()

    @property
    def surd(self) -> str:
        """Exact string (-b + i*sqrt(|D|))/(2a)."""
        return _surd(self.form)

    def to_json_obj(self) -> dict:
        a, b, c = self.form.a, self.form.b, self.form.c
        return {
            "a": a, "b": b, "c": c, "D": self.D,
            "z": [str(Fraction(-b, 2 * a)), -self.D, 2 * a],
            "locus": self.locus,
        }

    def sort_key(self):
        p = self.point
        return (p.im_sq, p.re, self.form)


def form_of_point(point: SurdPoint) -> QuadraticForm:
    return point.form()


def galois_rep(D: int) -> QuadraticForm:
    """The principal reduced form of discriminant D < 0."""
    if D >= 0 or D % 4 not in (0, 1):
        raise BadDiscriminant(f"{D} is not a negative discriminant")
    if D % 4 == 0:
        return QuadraticForm(1, 0, -D // 4)
    return QuadraticForm(1, 1, (1 - D) // 4)


def reduced_forms(D: int) -> list[QuadraticForm]:
    """Primitive reduced forms of discriminant D, one per class."""
    if D >= 0 or D % 4 not in (0, 1):
        raise BadDiscriminant(f"{D} is not a negative discriminant")
    out = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a:
                continue
            q = QuadraticForm(a, b, c)
            if q.is_primitive and q.is_reduced():
                out.append(q)
        a += 1
    return sorted(out)


def class_number(D: int) -> int:
    return len(reduced_forms(D))


def _sorted(points):
    return sorted(points, key=CMPoint.sort_key)


def enumerate_arc_A(a_max: int = 50) -> list[CMPoint]:
    """CM points on A whose principal representative also lies on A: i and rho.

    Every CM point on |z| = 1 is the root of a form (a, b, a); the scan keeps
    those whose principal form has its root on the unit circle.
    """
    out = []
    for a in range(1, a_max + 1):
        for b in range(0, a + 1):
            q = QuadraticForm(a, b, a)
            if q.disc >= 0 or not q.is_primitive:
                continue
            if galois_rep(q.disc).root().abs_sq() == 1:
                out.append(CMPoint(q, "A"))
    return _sorted(out)


def properly_represents_one(q: QuadraticForm) -> bool:
    """True when q is SL2(Z)-equivalent to the principal form."""
    red = reduce_form(q)
    return red == galois_rep(q.disc)


def reduce_form(q: QuadraticForm) -> QuadraticForm:
    a, b, c = q.a, q.b, q.c
    if q.disc >= 0 or a <= 0:
        raise BadDiscriminant(f"{q} is not positive definite")
    while True:
        if a > c:
            a, b, c = c, -b, a
            continue
        if b > a or b <= -a:
            # translate b into (-a, a]
            k = (a - b) // (2 * a)
            b2 = b + 2 * a * k
            c = a * k * k + b * k + c
            b = b2
            continue
        if a == c and b < 0:
            b = -b
        return QuadraticForm(a, b, c)


def enumerate_fricke_arc(p: int, c_max: int = 1) -> list[CMPoint]:
    """CM points on |z| = 1/sqrt(p) with -1/2 <= Re z <= 0 whose form class is principal.

    A point on this arc is the root of a form (p c, b, c); scanning c up to
    ``c_max`` and keeping the forms equivalent to the principal one gives the
    admissible candidates.  Only c = 1 survives for p = 2, 3, which the
    ``c_max`` parameter allows one to check.
    """
    if p not in (2, 3):
        raise ValueError("the Fricke arcs are only treated for p = 2, 3")
    out = []
    for c in range(1, c_max + 1):
        for b in range(0, p * c + 1):
            if gcd(b, c) != 1:
                continue
            q = QuadraticForm(p * c, b, c)
            if q.disc >= 0 or not q.is_primitive:
                continue
            if properly_represents_one(q):
                out.append(CMPoint(q, f"A{p}"))
    return _sorted(out)


def _line_points(locus: str, dbound: int, height) -> list[CMPoint]:
    out = set()
    height = Fraction(height)
    for absD in range(3, dbound + 1):
        if absD >= 4 * height * height:
            break
        D = -absD
        if locus == "L" and D % 4 != 1:
            continue
        if locus == "R" and D % 4 != 0:
            continue
        a_max = isqrt(absD // 3) if locus == "L" else isqrt(absD) // 2
        for a in range(1, a_max + 1):
            if locus == "L":
                # z = -1/2 + i sqrt|D| / (2a), root of 4a^2 z^2 + 4a^2 z + a^2 + |D|
                q = QuadraticForm(4 * a * a, 4 * a * a, a * a + absD).primitive()
            else:
                q = QuadraticForm(4 * a * a, 0, absD).primitive()
            pt = q.root()
            if pt.im_sq >= height * height:
                continue
            out.add(CMPoint(q, locus))
    return _sorted(out)


def enumerate_line_L(D_bound: int = 20, height_bound=2) -> list[CMPoint]:
    """Candidates -1/2 + i sqrt|D|/(2a), 1 <= a <= [sqrt(|D|/3)], D = 1 mod 4.

    The principal point (-1 + i sqrt|D|)/2 must itself lie below the height
    bound, which forces |D| < 4 h^2.
    """
    return _line_points("L", D_bound, height_bound)


def enumerate_line_R(D_bound: int = 20, height_bound=2) -> list[CMPoint]:
    """Candidates i sqrt|D|/(2a), 1 <= a <= [sqrt|D|/2], D = 0 mod 4, |D| < 4 h^2."""
    return _line_points("R", D_bound, height_bound)


def exception_set(p: int) -> list[SurdPoint]:
    """The 2p points (i - n)/(n^2 + 1) and (sqrt(3)/2 i - n + 1/2)/(n^2 - n + 1), 0 <= n < p.

    Returned as a raw union in that order, without identifying points that are
    equivalent under the level-p group.
    """
    first = [SurdPoint(Fraction(-n, n * n + 1), Fraction(1, (n * n + 1) ** 2)) for n in range(p)]
    second = []
    for n in range(p):
        d = n * n - n + 1
        second.append(SurdPoint(Fraction(1 - 2 * n, 2 * d), Fraction(3, 4 * d * d)))
    return first + second


def reduce_to_fundamental_domain(z, max_iter: int = 10_000):
    """Return (z', gamma) with z' = gamma z in the closed fundamental domain.

    The left-closed convention is used: -1/2 <= Re z' < 1/2 and |z'| >= 1,
    with |z'| = 1 forcing Re z' <= 0.  ``gamma`` is an integer 2x2 tuple.
    """
    z = mpmath.mpc(z)
    if z.imag <= 0:
        raise ValueError("z must lie in the upper half plane")
    a, b, c, d = 1, 0, 0, 1
    eps = mpmath.mpf(2) ** (-(mpmath.mp.prec - 8))
    for _ in range(max_iter):
        n = int(mpmath.floor(z.real + mpmath.mpf(1) / 2))
        if n:
            z -= n
            a, b = a - n * c, b - n * d
        if mpmath.fabs(z) ** 2 < 1 - eps:
            z = -1 / z
            a, b, c, d = -c, -d, a, b
            continue
        break
    else:
        raise NonConvergence(f"no reduction after {max_iter} steps")
    # boundary conventions
    if mpmath.fabs(mpmath.fabs(z) ** 2 - 1) <= eps and z.real > eps:
        z = -1 / z
        a, b, c, d = -c, -d, a, b
    if z.real >= mpmath.mpf(1) / 2 - eps:
        z -= 1
        a, b = a - c, b - d
    if c < 0 or (c == 0 and d < 0):
        a, b, c, d = -a, -b, -c, -d
    return z, ((a, b), (c, d))
