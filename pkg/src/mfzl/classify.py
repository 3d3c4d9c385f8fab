"""CM versus transcendental-candidate verdicts for located zeros.

A zero z is CM when z is imaginary quadratic; then j(z) is an algebraic
integer whose minimal polynomial is a Hilbert class polynomial.  Both facts
are searched for independently (rational recognition of z, integer relations
among powers of j(z)) and a verdict is only issued when they agree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, log10

import mpmath

from .cm import QuadraticForm, class_number, reduced_forms
from .errors import BadDiscriminant
from .jpoly import extract_pf, integrality_report
from .numeric import EvalContext, default_context, j_value
from .qseries import QSeries

__all__ = [
    "Verdict", "JRecognition", "recognize_quadratic", "recognize_j_integer",
    "class_polynomial", "classify_zero", "integrality_certificate",
    "D_MAX", "H_MAX", "QUAD_HEIGHT",
]

D_MAX = 8
H_MAX = 10**40
QUAD_HEIGHT = 10**6
_MARGIN = 12  # decimal digits kept in reserve for relation searches


def _to_fraction(x) -> Fraction:
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    if man == 0:
        return Fraction(0)
    return Fraction((-1) ** sign * int(man)) * (Fraction(2) ** int(exp))


def recognize_quadratic(z, ctx: EvalContext | None = None, height: int = QUAD_HEIGHT):
    """Primitive (a, b, c) with a z^2 + b z + c = 0 and max(|a|,|b|,|c|) <= height, or None.

    Re z and |z|^2 are recognized as rationals with denominator <= height
    (best approximations by continued fractions) and accepted when they match
    to 2^(-P/2).
    """
    ctx = ctx or default_context()
    with ctx.work():
        z = mpmath.mpc(z)
        if z.imag <= 0:
            raise ValueError("z must lie in the upper half plane")
        tol = mpmath.mpf(2) ** (-(ctx.prec // 2))
        x, n = z.real, z.real**2 + z.imag**2
        rx = _to_fraction(x).limit_denominator(height)
        rn = _to_fraction(n).limit_denominator(height)
        if abs(x - _mpq(rx)) > tol * max(1, abs(x)) or abs(n - _mpq(rn)) > tol * max(1, n):
            return None
        b, c = -2 * rx, rn
        a = b.denominator * c.denominator // gcd(b.denominator, c.denominator)
        q = QuadraticForm(a, int(b * a), int(c * a)).primitive()
        if max(abs(q.a), abs(q.b), abs(q.c)) > height or q.disc >= 0:
            return None
        return q


def _mpq(r: Fraction):
    return mpmath.mpf(r.numerator) / r.denominator


@dataclass
class JRecognition:
    """Outcome of the search for a relation satisfied by j(z).

    ``kind`` is "integer", "minpoly" (monic integer polynomial), "nonintegral"
    (a primitive integer relation with non-unit leading coefficient, so j(z)
    is algebraic but not an algebraic integer) or None.
    """

    j: mpmath.mpc
    kind: str | None = None
    poly: list = field(default_factory=list)  # ascending integer coefficients
    bounds: list = field(default_factory=list)  # (degree, height) pairs searched

    @property
    def is_algebraic_integer(self) -> bool:
        return self.kind in ("integer", "minpoly")


def _relation(vec, tol, maxcoeff):
    scale = max(abs(v) for v in vec)
    if scale == 0:
        return None
    w = [v / scale for v in vec]
    if min(abs(v) for v in w) < tol * 100:
        return None
    return mpmath.pslq(w, tol=tol, maxcoeff=int(maxcoeff), maxsteps=20000)


def recognize_j_integer(z, ctx: EvalContext | None = None, d_max: int = D_MAX, h_max: int = H_MAX,
                        j=None) -> JRecognition:
    """Recognize j(z) as an integer or a root of a monic integer polynomial.

    The height searched in degree d is capped by the available precision:
    a relation with d + 1 coefficients of height H is only meaningful when
    (d + 1) log10 H stays below the number of correct digits.  The heights
    actually used are recorded in ``bounds``.
    """
    ctx = ctx or default_context()
    with ctx.work():
        jv = mpmath.mpc(j) if j is not None else j_value(z, ctx)
        out = JRecognition(jv)
        digits = ctx.prec * log10(2)
        mag = max(1.0, float(abs(jv)))
        tol_snap = mpmath.mpf(2) ** (-(ctx.prec // 2)) * mag
        is_real = abs(jv.imag) <= tol_snap
        if is_real:
            n = int(mpmath.nint(jv.real))
            if abs(jv - n) <= tol_snap:
                out.kind, out.poly = "integer", [-n, 1]
                out.bounds.append((1, "snap"))
                return out
        tol = mpmath.mpf(10) ** (-(digits - _MARGIN))
        xi = mpmath.sqrt(2)
        powers = [mpmath.mpc(1)]
        for _ in range(d_max):
            powers.append(powers[-1] * jv)
        for d in range(1, d_max + 1):
            usable = digits - _MARGIN - d * log10(mag)
            H = min(h_max, int(10 ** (usable / (d + 1)))) if usable > 0 else 0
            if H < 10:
                break
            out.bounds.append((d, H))
            if is_real:
                vec = [p.real for p in powers[: d + 1]]
            else:
                vec = [p.real + xi * p.imag for p in powers[: d + 1]]
            rel = _relation(vec, tol, H)
            if rel is None:
                continue
            while rel and rel[-1] == 0:
                rel = rel[:-1]
            if len(rel) < 2:
                continue
            # both real and imaginary parts must vanish
            val = mpmath.fsum(c * p for c, p in zip(rel, powers))
            size = mpmath.fsum(abs(c) * abs(p) for c, p in zip(rel, powers))
            if abs(val) > mpmath.mpf(10) ** (-(digits / 2)) * size:
                continue
            g = 0
            for c in rel:
                g = gcd(g, c)
            rel = [c // g for c in rel]
            if rel[-1] < 0:
                rel = [-c for c in rel]
            out.poly = rel
            out.kind = "minpoly" if rel[-1] == 1 else "nonintegral"
            return out
        return out


@lru_cache(maxsize=None)
def class_polynomial(D: int) -> tuple:
    """Hilbert class polynomial of discriminant D (ascending integer coefficients).

    prod (X - j(tau_Q)) over reduced forms Q, computed with enough precision
    that rounding the coefficients to integers is safe.
    """
    forms = reduced_forms(D)
    # |j(tau)| ~ exp(pi sqrt|D| / a)
    bits = sum(mpmath.pi * mpmath.sqrt(-D) / q.a for q in forms) / mpmath.log(2)
    prec = int(bits) + 64 + 16 * len(forms)
    ctx = EvalContext(prec=prec)
    with ctx.work():
        coeffs = [mpmath.mpc(1)]
        for q in forms:
            tau = q.root().to_mpc()
            r = j_value(tau, ctx)
            new = [mpmath.mpc(0)] * (len(coeffs) + 1)
            for i, c in enumerate(coeffs):
                new[i + 1] += c
                new[i] -= r * c
            coeffs = new
        out = []
        for c in coeffs:
            n = int(mpmath.nint(c.real))
            if abs(c - n) > mpmath.mpf("0.01"):
                raise ArithmeticError(f"class polynomial coefficient {c} is not near an integer")
            out.append(n)
    return tuple(out)


@dataclass
class Verdict:
    kind: str  # "CM", "TranscendentalCandidate" or "Unresolved"
    D: int | None = None
    form: QuadraticForm | None = None
    reason: str = ""
    j: mpmath.mpc | None = None
    minpoly: list | None = None
    bounds: dict = field(default_factory=dict)

    def __str__(self):
        if self.kind == "CM":
            return f"CM({self.D})"
        if self.kind == "Unresolved":
            return f"Unresolved({self.reason})"
        return "TranscendentalCandidate"

    def to_json_obj(self, digits: int = 30) -> dict:
        jv = self.j
        return {
            "kind": self.kind,
            "D": self.D,
            "form": [self.form.a, self.form.b, self.form.c] if self.form else None,
            "reason": self.reason,
            "j": None if jv is None else [mpmath.nstr(jv.real, digits), mpmath.nstr(jv.imag, digits)],
            "minpoly": self.minpoly,
            "bounds": {k: (v if isinstance(v, (int, str)) else [list(map(str, b)) for b in v])
                       for k, v in self.bounds.items()},
        }


def _poly_value(coeffs, x):
    acc = mpmath.mpc(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def classify_zero(z, ctx: EvalContext | None = None, height: int = QUAD_HEIGHT,
                  d_max: int = D_MAX, h_max: int = H_MAX) -> Verdict:
    """Verdict for a point z (or a ZeroRecord carrying one in ``.z``)."""
    ctx = ctx or default_context()
    z = getattr(z, "z", z)
    with ctx.work():
        z = mpmath.mpc(z)
        jv = j_value(z, ctx)
        bounds = {"quadratic_height": height, "degree_max": d_max, "height_max": str(h_max)}
        q = recognize_quadratic(z, ctx, height)
        if q is not None:
            D = q.disc
            if D % 4 not in (0, 1):
                raise BadDiscriminant(f"recognized form {q} has impossible discriminant {D}")
            res = abs(q.a * z * z + q.b * z + q.c)
            if res > mpmath.mpf(10) ** (-(ctx.prec // 4)) * max(abs(q.a), abs(q.b), abs(q.c)):
                return Verdict("Unresolved", D, q, "quadratic residual too large", jv, bounds=bounds)
            h = class_number(D)
            if h > d_max:
                return Verdict("Unresolved", D, q, f"class number {h} exceeds degree bound {d_max}",
                               jv, bounds=bounds)
            H = class_polynomial(D)
            scale = mpmath.fsum(abs(c) * max(1, abs(jv)) ** i for i, c in enumerate(H))
            if abs(_poly_value(H, jv)) > mpmath.mpf(2) ** (-(ctx.prec // 2)) * scale:
                return Verdict("Unresolved", D, q, "z is quadratic but j(z) is not a root of its class polynomial",
                               jv, bounds=bounds)
            return Verdict("CM", D, q, "", jv, list(H), bounds)
        rec = recognize_j_integer(z, ctx, d_max, h_max, j=jv)
        bounds["j_searched"] = rec.bounds
        if rec.is_algebraic_integer:
            return Verdict("Unresolved", None, None,
                           "j(z) looks like an algebraic integer but z is not quadratic within the height bound",
                           jv, rec.poly, bounds)
        reason = ""
        if rec.kind == "nonintegral":
            reason = "j(z) is algebraic but not an algebraic integer"
        return Verdict("TranscendentalCandidate", None, None, reason, jv, rec.poly or None, bounds)


def integrality_certificate(f: QSeries, k: int) -> dict:
    """Run the integrality test on P_f and report which conclusion applies."""
    P = extract_pf(f, k)
    rep = integrality_report(P)
    return {
        "verdict": rep.verdict,
        "report": rep.to_json_obj(),
        "leading": str(P.leading),
        "offending": {str(i): str(P.coeffs[i]) for i in rep.offending_indices},
        "degree": P.degree,
    }
