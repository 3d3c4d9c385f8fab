"""Zero location on arcs and lines, transport between loci and contour counts.

On each locus a form is multiplied by a phase that makes it real (by the
reflection symmetry of its real Fourier coefficients), so zeros can be
bracketed by sign changes and refined on a real interval.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .errors import (
    ContourTooClose, InsufficientTruncation, NonConvergence, NotRealOnArc, NotRealOnLine,
)
from .expr import FormExpr
from .forms import expand
from .numeric import EvalContext, default_context, eval_expr, eval_series
from .qseries import QSeries

__all__ = [
    "Locus", "get_locus", "ZeroRecord", "FormHandle", "as_form", "TransportedForm",
    "eval_form", "restricted_real_profile", "find_zeros_on_arc", "find_zeros_on_line",
    "find_zeros", "transport", "count_zeros_contour", "ContourCount", "zeros_to_csv",
    "profile_to_csv",
    "GAMMA_L", "GAMMA_R",
]

GAMMA_R = ((1, -1), (1, 1))
GAMMA_L = ((-2, -1), (1, -1))


# -- loci ---------------------------------------------------------------------

@dataclass(frozen=True)
class Locus:
    """An arc r e^(i theta) or a vertical line x0 + i t, with a parameter interval."""

    name: str
    kind: str  # "arc" or "line"
    radius_sq: Fraction = Fraction(1)
    x0: Fraction = Fraction(0)
    lo: object = None
    hi: object = None

    def point(self, t):
        if self.kind == "arc":
            return mpmath.sqrt(_mp(self.radius_sq)) * mpmath.expj(t)
        return mpmath.mpc(_mp(self.x0), t)

    def with_range(self, lo, hi) -> "Locus":
        return Locus(self.name, self.kind, self.radius_sq, self.x0, lo, hi)

    def bounds(self):
        return mpmath.mpf(self.lo()) if callable(self.lo) else mpmath.mpf(self.lo), \
            mpmath.mpf(self.hi()) if callable(self.hi) else mpmath.mpf(self.hi)


def _mp(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def get_locus(name: str, height=2) -> Locus:
    """A, A2, A3 (arcs |z|^2 = 1, 1/2, 1/3) or the lines L (Re z = -1/2) and R (Re z = 0)."""
    if name == "A":
        return Locus("A", "arc", Fraction(1), lo=lambda: mpmath.pi / 2, hi=lambda: 2 * mpmath.pi / 3)
    if name == "A2":
        return Locus("A2", "arc", Fraction(1, 2), lo=lambda: mpmath.pi / 2, hi=lambda: 3 * mpmath.pi / 4)
    if name == "A3":
        return Locus("A3", "arc", Fraction(1, 3), lo=lambda: mpmath.pi / 2, hi=lambda: 5 * mpmath.pi / 6)
    if name == "L":
        return Locus("L", "line", x0=Fraction(-1, 2), lo=lambda: mpmath.sqrt(3) / 2, hi=lambda: mpmath.mpf(height))
    if name == "R":
        return Locus("R", "line", x0=Fraction(0), lo=lambda: mpmath.mpf(1), hi=lambda: mpmath.mpf(height))
    raise ValueError(f"unknown locus {name!r}; expected one of A, A2, A3, L, R")


# -- forms as evaluable objects ----------------------------------------------

class FormHandle:
    """Something with a weight, a label and a value at a point."""

    weight: int
    label: str

    def value(self, z):
        raise NotImplementedError

    def phase(self, z, locus: Locus):
        """Factor that makes the value real on ``locus``."""
        if locus.kind == "arc":
            u = z / abs(z)
            return u ** (self.weight // 2) if self.weight % 2 == 0 else mpmath.sqrt(u) ** self.weight
        return mpmath.mpf(1)


class ExprForm(FormHandle):
    def __init__(self, expr: FormExpr, ctx: EvalContext):
        self.expr, self.ctx = expr, ctx
        self.weight, self.label = expr.weight, str(expr)

    def value(self, z):
        return eval_expr(self.expr, z, self.ctx)


class SeriesForm(FormHandle):
    def __init__(self, series: QSeries, weight: int, ctx: EvalContext, label="series", modular=True):
        self.series, self.ctx, self.weight, self.label = series, ctx, weight, label
        self.modular = modular

    def value(self, z):
        return eval_series(self.series, z, self.weight if self.modular else None, self.ctx)


def _apply(m, z):
    (a, b), (c, d) = m
    return (a * z + b) / (c * z + d)


def _inverse(m):
    (a, b), (c, d) = m
    return ((d, -b), (-c, a))


class TransportedForm(FormHandle):
    """z -> base(gamma^-1 z): the zeros of base on A move to the line gamma(A)."""

    def __init__(self, base: FormHandle, which: str):
        if which not in ("L", "R"):
            raise ValueError("transport target must be L or R")
        self.base, self.which = base, which
        self.gamma = GAMMA_L if which == "L" else GAMMA_R
        self.weight = base.weight
        self.label = f"{base.label}@gamma_{which}^-1"

    def value(self, z):
        return self.base.value(_apply(_inverse(self.gamma), z))

    def phase(self, z, locus: Locus):
        w = _apply(_inverse(self.gamma), z)
        return self.base.phase(w, get_locus("A"))


def as_form(f, weight: int | None = None, ctx: EvalContext | None = None) -> FormHandle:
    ctx = ctx or default_context()
    if isinstance(f, FormHandle):
        return f
    if isinstance(f, FormExpr):
        return ExprForm(f, ctx)
    if isinstance(f, QSeries):
        if weight is None:
            raise ValueError("a bare q-series needs its weight")
        return SeriesForm(f, weight, ctx)
    raise TypeError(f"cannot evaluate {type(f).__name__}")


def eval_form(f, z, weight: int | None = None, ctx: EvalContext | None = None):
    ctx = ctx or default_context()
    with ctx.work():
        return as_form(f, weight, ctx).value(mpmath.mpc(z))


# -- real profiles --------------------------------------------------------------

def _real_tol(ctx: EvalContext):
    return mpmath.mpf(10) ** (-(ctx.prec // 4))


def restricted_real_profile(f, locus: Locus, ctx: EvalContext | None = None, weight=None):
    """t -> real value of phase * f on ``locus``; raises if the imaginary part survives."""
    ctx = ctx or default_context()
    h = as_form(f, weight, ctx)
    tol = _real_tol(ctx)
    err = NotRealOnArc if locus.kind == "arc" else NotRealOnLine

    def g(t):
        z = locus.point(t)
        w = h.value(z) * h.phase(z, locus)
        w = mpmath.mpc(w)
        if abs(w.imag) > tol * max(1, abs(w)):
            raise err(f"{h.label} is not real on {locus.name} at t = {mpmath.nstr(t, 10)}"
                      f" (Im = {mpmath.nstr(w.imag, 5)})")
        return w.real

    return g


# -- records ----------------------------------------------------------------------

@dataclass
class ZeroRecord:
    locus: str
    param: mpmath.mpf
    z: mpmath.mpc
    residual: mpmath.mpf
    width: mpmath.mpf
    weight: int
    form: str
    multiplicity: int = 1
    endpoint: bool = False
    even_order: bool = False
    extra: dict = field(default_factory=dict)

    def to_json_obj(self, digits: int = 40) -> dict:
        return {
            "locus": self.locus,
            "param": mpmath.nstr(self.param, digits),
            "re": mpmath.nstr(self.z.real, digits),
            "im": mpmath.nstr(self.z.imag, digits),
            "residual": mpmath.nstr(self.residual, 5),
            "width": mpmath.nstr(self.width, 5),
            "weight": self.weight,
            "form": self.form,
            "multiplicity": self.multiplicity,
            "endpoint": self.endpoint,
        }


CSV_FIELDS = ["locus", "param", "re", "im", "residual", "width", "weight", "form", "multiplicity", "endpoint"]


def zeros_to_csv(records, extra_columns=None, digits: int = 40) -> str:
    extra_columns = extra_columns or {}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS + list(extra_columns))
    for i, r in enumerate(records):
        row = r.to_json_obj(digits)
        w.writerow([row[k] for k in CSV_FIELDS] + [extra_columns[c][i] for c in extra_columns])
    return buf.getvalue()


def profile_to_csv(f, locus, samples: int = 256, ctx: EvalContext | None = None, weight=None,
                   height=2, digits: int | None = None) -> str:
    """Sample the real profile of f on ``locus`` at evenly spaced parameters."""
    ctx = ctx or default_context()
    loc = get_locus(locus, height) if isinstance(locus, str) else locus
    digits = digits or int(ctx.prec * 0.30103)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["theta_or_t", "value"])
    with ctx.work():
        g = restricted_real_profile(f, loc, ctx, weight)
        lo, hi = loc.bounds()
        for i in range(samples + 1):
            t = lo + (hi - lo) * i / samples
            w.writerow([mpmath.nstr(t, digits), mpmath.nstr(g(t), digits)])
    return buf.getvalue()


# -- root finding -------------------------------------------------------------------

def _sign(x, tol):
    if abs(x) <= tol:
        return 0
    return 1 if x > 0 else -1


def _illinois(g, a, b, ga, gb, xtol, max_iter=2000):
    """Bracketed regula falsi with the Illinois modification, bisection as fallback."""
    side = 0
    for it in range(max_iter):
        if abs(b - a) <= xtol:
            break
        if it % 8 == 7:
            c = (a + b) / 2  # guarantees progress on stubborn brackets
        else:
            c = b - gb * (b - a) / (gb - ga)
            if not (min(a, b) < c < max(a, b)):
                c = (a + b) / 2
        gc = g(c)
        if gc == 0:
            return c, c, gc
        if (gc > 0) == (gb > 0):
            b, gb = c, gc
            if side == -1:
                ga /= 2
            side = -1
        else:
            a, ga = c, gc
            if side == 1:
                gb /= 2
            side = 1
    else:
        raise NonConvergence("root refinement did not converge")
    return a, b, g((a + b) / 2)


def _multiplicity(g, t0, direction, scale):
    """Estimate the order of vanishing from |g(t0 + 2h)| / |g(t0 + h)|."""
    h = mpmath.mpf(10) ** (-mpmath.mp.dps // 6) * direction
    g1, g2 = abs(g(t0 + h)), abs(g(t0 + 2 * h))
    if g1 == 0:
        return 1
    m = mpmath.log(g2 / g1) / mpmath.log(2)
    return max(1, int(mpmath.nint(m)))


def _golden_min(g, a, b, iters=200):
    invphi = (mpmath.sqrt(5) - 1) / 2
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = abs(g(c)), abs(g(d))
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = abs(g(c))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = abs(g(d))
        if abs(b - a) < mpmath.mpf(2) ** (-mpmath.mp.prec // 2):
            break
    t = (a + b) / 2
    return t, abs(g(t))


def _scan(g, lo, hi, samples: int, ctx: EvalContext):
    """Return [(t, width, multiplicity, endpoint, even_order)] for zeros of g on [lo, hi]."""
    ts = [lo + (hi - lo) * i / samples for i in range(samples + 1)]
    vs = [g(t) for t in ts]
    scale = max(mpmath.mpf(1), max(abs(v) for v in vs))
    ztol = _real_tol(ctx) * scale
    signs = [_sign(v, ztol) for v in vs]
    xtol = mpmath.mpf(2) ** (-(ctx.prec - 16)) * max(1, abs(hi))
    found = []
    for i, s in enumerate(signs):
        if s == 0:
            endpoint = i in (0, samples)
            direction = -1 if i == samples else 1
            m = _multiplicity(g, ts[i], direction, scale)
            found.append((ts[i], mpmath.mpf(0), m, endpoint, m % 2 == 0))
    for i in range(samples):
        s0, s1 = signs[i], signs[i + 1]
        if s0 and s1 and s0 != s1:
            a, b, _ = _illinois(g, ts[i], ts[i + 1], vs[i], vs[i + 1], xtol)
            t = (a + b) / 2
            width = abs(b - a)
            delta = max(width, xtol)
            if _sign(g(t - delta), 0) == _sign(g(t + delta), 0):
                raise NonConvergence(f"bracket around t = {mpmath.nstr(t, 15)} not confirmed")
            found.append((t, width, 1, False, False))
    # possible zeros of even order: interior local minima of |g| without a sign change
    for i in range(1, samples):
        if not (signs[i - 1] == signs[i] == signs[i + 1] != 0):
            continue
        if not (abs(vs[i]) < abs(vs[i - 1]) and abs(vs[i]) < abs(vs[i + 1])):
            continue
        if abs(vs[i]) > scale / 1000:
            continue
        t, m = _golden_min(g, ts[i - 1], ts[i + 1])
        if m <= mpmath.sqrt(ztol) * scale:
            mult = _multiplicity(g, t, 1, scale)
            found.append((t, mpmath.mpf(2) ** (-(ctx.prec // 2)), max(2, mult), False, True))
    found.sort(key=lambda r: r[0])
    return found


def _default_samples(weight: int) -> int:
    return max(64, 8 * abs(weight))


def _find(f, locus: Locus, samples, ctx, weight=None):
    ctx = ctx or default_context()
    with ctx.work():
        h = as_form(f, weight, ctx)
        g = restricted_real_profile(h, locus, ctx)
        lo, hi = locus.bounds()
        samples = samples or _default_samples(h.weight)
        out = []
        for t, width, m, endpoint, even in _scan(g, lo, hi, samples, ctx):
            z = locus.point(t)
            if locus.kind == "line":
                z = mpmath.mpc(_mp(locus.x0), t)
            out.append(ZeroRecord(locus.name, t, z, abs(h.value(z)), width, h.weight, h.label,
                                  m, endpoint, even))
        return out


def find_zeros_on_arc(f, locus="A", samples: int | None = None, ctx: EvalContext | None = None,
                      weight=None):
    """Zeros of f on the arc A (|z| = 1) or the Fricke arcs A2, A3 (|z|^2 = 1/p)."""
    loc = get_locus(locus) if isinstance(locus, str) else locus
    if loc.kind != "arc":
        raise ValueError(f"{loc.name} is not an arc")
    return _find(f, loc, samples, ctx, weight)


def find_zeros_on_line(f, locus="R", height=2, samples: int | None = None,
                       ctx: EvalContext | None = None, weight=None, t_range=None):
    """Zeros of f on Re z = -1/2 (L) or Re z = 0 (R) with Im z up to ``height``."""
    loc = get_locus(locus, height) if isinstance(locus, str) else locus
    if loc.kind != "line":
        raise ValueError(f"{loc.name} is not a line")
    if t_range is not None:
        loc = loc.with_range(*t_range)
    return _find(f, loc, samples, ctx, weight)


def find_zeros(f, locus: str, height=2, samples=None, ctx=None, weight=None):
    if locus in ("L", "R"):
        return find_zeros_on_line(f, locus, height, samples, ctx, weight)
    return find_zeros_on_arc(f, locus, samples, ctx, weight)


def transport(z, which: str = "R", inverse: bool = False):
    """Image of z under gamma_R = [[1,-1],[1,1]] or gamma_L = [[-2,-1],[1,-1]].

    gamma_R maps e^(i theta) to i tan(theta/2), so the arc A lands on Re z = 0;
    gamma_L fixes rho and sends i to (-1 + 3i)/2, so A lands on Re z = -1/2.
    """
    m = GAMMA_R if which == "R" else GAMMA_L
    if which not in ("L", "R"):
        raise ValueError("which must be 'L' or 'R'")
    if inverse:
        m = _inverse(m)
    return _apply(m, mpmath.mpc(z))


# -- argument principle -------------------------------------------------------------

@dataclass
class ContourCount:
    count: int
    raw: complex
    residual: float
    terms: int
    nodes: int


def _contour_series(f, weight, y_min: float) -> QSeries:
    # enough terms that the float tail below y_min is negligible
    N = 40
    while True:
        s = expand(f, N) if isinstance(f, FormExpr) else f
        if s.ramification != 1:
            raise ValueError("contour counting needs integral exponents")
        last = [abs(float(c)) * np.exp(-2 * np.pi * y_min * float(e)) for e, c in list(s.terms())[-4:]]
        head = max(abs(float(c)) * np.exp(-2 * np.pi * y_min * float(e)) for e, c in s.terms())
        if max(last, default=0.0) < 1e-18 * max(head, 1.0):
            return s
        if not isinstance(f, FormExpr):
            raise InsufficientTruncation(
                f"truncation q^{s.truncation} too short for a contour down to Im z = {y_min:.3f}"
            )
        N *= 2
        if N > 4000:
            raise InsufficientTruncation("contour needs more than 4000 terms")


def count_zeros_contour(f, weight: int | None = None, radius_sq=Fraction(1), Y: float = 10.0,
                        delta: float = 0.01, eps: float = 0.01, eta: float = 0.01,
                        tol: float = 1e-7, max_nodes: int = 1 << 16) -> ContourCount:
    """Zeros with multiplicity in -1/2 <= Re z < 1/2, |z|^2 >= radius_sq, Im z < Y.

    The boundary is displaced so that points on the left half (Re z = -1/2 and
    the left part of the arc) are inside and their right-hand images outside:
    left side at Re = -1/2 - delta, right side at Re = 1/2 - delta, arc radius
    r - eps for Re < eta and r + eps beyond.  The logarithmic derivative is
    integrated with the trapezoid rule, doubling nodes per edge until stable.
    """
    r = float(radius_sq) ** 0.5
    r1, r2 = r - eps, r + eps
    xl, xr = -0.5 - delta, 0.5 - delta
    if r1 <= abs(xl):
        raise ValueError("arc displacement too large for this radius")
    yl = (r1 * r1 - xl * xl) ** 0.5
    y1 = (r1 * r1 - eta * eta) ** 0.5
    y2 = (r2 * r2 - eta * eta) ** 0.5
    yr = (r2 * r2 - xr * xr) ** 0.5
    y_min = min(yl, yr)
    s = _contour_series(f, weight, y_min * 0.98)
    exps = np.array([int(e) for e, _ in s.terms()], dtype=float)
    coef = np.array([float(c) for _, c in s.terms()], dtype=float)
    tl, t1 = np.arctan2(yl, xl), np.arctan2(y1, eta)
    t2, tr = np.arctan2(y2, eta), np.arctan2(yr, xr)

    def line(p0, p1):
        return lambda u: (p0 + (p1 - p0) * u, np.full_like(u, p1 - p0, dtype=complex))

    def arc(rad, a0, a1):
        return lambda u: (rad * np.exp(1j * (a0 + (a1 - a0) * u)),
                          1j * (a1 - a0) * rad * np.exp(1j * (a0 + (a1 - a0) * u)))

    edges = [
        arc(r1, tl, t1),
        line(complex(eta, y1), complex(eta, y2)),
        arc(r2, t2, tr),
        line(complex(xr, yr), complex(xr, Y)),
        line(complex(xr, Y), complex(xl, Y)),
        line(complex(xl, Y), complex(xl, yl)),
    ]

    def logderiv(z):
        q = np.exp(2j * np.pi * z)
        qn = q[:, None] ** exps[None, :]
        fv = qn @ coef
        dv = 2j * np.pi * (qn @ (coef * exps))
        if np.any(np.abs(fv) == 0):
            raise ContourTooClose("form vanishes on the contour")
        return dv / fv

    def trap(edge, n):
        u = np.linspace(0.0, 1.0, n + 1)
        z, dz = edge(u)
        vals = logderiv(z) * dz
        return (vals.sum() - (vals[0] + vals[-1]) / 2) / n

    total = 0j
    nodes = 0
    for edge in edges:
        n = 64
        prev = trap(edge, n)
        while True:
            n *= 2
            cur = trap(edge, n)
            if abs(cur - prev) < tol * 2 * np.pi or n >= max_nodes:
                break
            prev = cur
        nodes += n
        total += cur
    raw = total / (2j * np.pi)
    count = int(round(raw.real))
    residual = float(abs(raw - count))
    if residual >= 0.1:
        raise ContourTooClose(
            f"winding number {raw:.4f} is not near an integer; a zero may lie on the contour"
        )
    return ContourCount(count, complex(raw), residual, len(exps), nodes)
