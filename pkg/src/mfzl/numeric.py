"""Arbitrary-precision evaluation of forms on the upper half plane.

Generators are evaluated after moving z into the fundamental domain, where
|q| <= exp(-pi sqrt 3) and all series converge geometrically; the automorphy
factor (cz + d)^k carries the value back.  Series are summed until a rigorous
(for Eisenstein series and Delta) or heuristic (for arbitrary q-series) tail
bound drops below 2^-prec.
"""
from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from .cm import reduce_to_fundamental_domain
from .errors import TailBoundUnsatisfiable
from .expr import Const, FormExpr, Gen, Power, Product, Scalar, Sum
from .qseries import QSeries, bernoulli, sigma as _sigma

__all__ = [
    "DEFAULT_PRECISION", "EvalContext", "default_context", "eval_generator",
    "eval_expr", "eval_series", "eisenstein_value", "delta_value", "j_value",
]

DEFAULT_PRECISION = 256
_MAX_TERMS = 100_000


@dataclass(frozen=True)
class EvalContext:
    """Working precision in bits and a cap on the number of series terms."""

    prec: int = DEFAULT_PRECISION
    max_terms: int = _MAX_TERMS

    @contextmanager
    def work(self):
        with mpmath.workprec(self.prec):
            yield self

    @property
    def eps(self):
        return mpmath.mpf(2) ** (-self.prec)


def default_context(prec: int | None = None) -> EvalContext:
    """Context from ``prec`` or the MFZL_PRECISION environment variable."""
    if prec is None:
        env = os.environ.get("MFZL_PRECISION")
        prec = int(env) if env else DEFAULT_PRECISION
    if prec < 53:
        raise ValueError("precision below 53 bits is not supported")
    return EvalContext(prec=prec)


def _mpf(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


@lru_cache(maxsize=None)
def sigma(k: int, n: int) -> int:
    return _sigma(k, n)


@lru_cache(maxsize=None)
def _eis_constant(k: int) -> Fraction:
    return Fraction(-2 * k) / bernoulli(k)


def _eisenstein_q(k: int, q, max_terms: int):
    # 1 + c sum sigma_{k-1}(n) q^n with sigma_{k-1}(m) <= zeta(k-1) m^(k-1) <= 2 m^(k-1)
    c = _mpf(_eis_constant(k))
    aq = abs(q)
    eps = mpmath.mpf(2) ** (-mpmath.mp.prec - 4)
    total = mpmath.mpc(0)
    qn = mpmath.mpc(1)
    for n in range(1, max_terms + 1):
        qn *= q
        total += sigma(k - 1, n) * qn
        m = n + 1
        ratio = (mpmath.mpf(m + 1) / m) ** (k - 1) * aq
        if ratio < mpmath.mpf(1) / 2:
            tail = 2 * abs(c) * mpmath.mpf(m) ** (k - 1) * aq**m / (1 - ratio)
            if tail < eps * (1 + abs(c * total)):
                return 1 + c * total
    raise TailBoundUnsatisfiable(f"E_{k} needs more than {max_terms} terms at |q| = {mpmath.nstr(aq, 5)}")


def _delta_q(q, max_terms: int):
    # q prod (1 - q^n)^24 via Euler's pentagonal series for prod (1 - q^n)
    eps = mpmath.mpf(2) ** (-mpmath.mp.prec - 4)
    aq = abs(q)
    s = mpmath.mpc(1)
    for m in range(1, max_terms + 1):
        sign = -1 if m % 2 else 1
        e1 = m * (3 * m - 1) // 2
        s += sign * (q**e1 + q**(e1 + m))
        # remaining terms are bounded by a geometric series in |q|^(next exponent)
        if aq ** ((m + 1) * (3 * m + 2) // 2) * 4 < eps:
            return q * s**24
    raise TailBoundUnsatisfiable("pentagonal series did not converge")


def _qvar(z):
    return mpmath.expjpi(2 * z)


def _reduced(z):
    zr, ((a, b), (c, d)) = reduce_to_fundamental_domain(z)
    return zr, c * z + d


def eisenstein_value(k: int, z, ctx: EvalContext | None = None):
    ctx = ctx or default_context()
    zr, cz = _reduced(z)
    return _eisenstein_q(k, _qvar(zr), ctx.max_terms) / cz**k


def delta_value(z, ctx: EvalContext | None = None):
    ctx = ctx or default_context()
    zr, cz = _reduced(z)
    return _delta_q(_qvar(zr), ctx.max_terms) / cz**12


def j_value(z, ctx: EvalContext | None = None):
    ctx = ctx or default_context()
    zr, _ = _reduced(z)
    q = _qvar(zr)
    e4 = _eisenstein_q(4, q, ctx.max_terms)
    return e4**3 / _delta_q(q, ctx.max_terms)


def eval_generator(g: Gen, z, ctx: EvalContext | None = None):
    z = mpmath.mpc(z)
    if g.kind == "Ek":
        return eisenstein_value(g.k, z, ctx)
    if g.kind == "EkScaled":
        return eisenstein_value(g.k, g.p * z, ctx)
    if g.kind == "Delta":
        return delta_value(z, ctx)
    if g.kind == "DeltaScaled":
        return delta_value(g.p * z, ctx)
    return j_value(z, ctx)


def eval_expr(expr: FormExpr, z, ctx: EvalContext | None = None):
    """Value of ``expr`` at z at the current mpmath precision."""
    cache: dict = {}

    def go(e):
        if isinstance(e, Gen):
            if e not in cache:
                cache[e] = eval_generator(e, z, ctx)
            return cache[e]
        if isinstance(e, Const):
            return _mpf(e.value)
        if isinstance(e, Scalar):
            return _mpf(e.c) * go(e.expr)
        if isinstance(e, Power):
            return go(e.base) ** e.n
        if isinstance(e, Product):
            out = mpmath.mpf(1)
            for f in e.factors:
                out *= go(f)
            return out
        if isinstance(e, Sum):
            return mpmath.fsum(go(t) for t in e.terms)
        raise TypeError(f"not a form expression: {e!r}")

    return go(expr)


def eval_series(f: QSeries, z, weight: int | None = None, ctx: EvalContext | None = None):
    """Sum a truncated q-series at z.

    With ``weight`` given (and integral exponents) the series is treated as a
    level-one form and evaluated at the reduced point.  The truncation error
    is estimated from the size of the last known terms; if that estimate is
    not below 2^(-prec/2) relative to the value, TailBoundUnsatisfiable is
    raised since the truncation is too short for the requested point.
    """
    ctx = ctx or default_context()
    z = mpmath.mpc(z)
    factor = mpmath.mpf(1)
    if weight is not None and f.ramification == 1:
        zr, cz = _reduced(z)
        z, factor = zr, cz ** (-weight)
    total = mpmath.mpc(0)
    last = []
    for e, c in f.terms():
        t = _mpf(c) * mpmath.expjpi(2 * _mpf(e) * z)
        total += t
        last.append(abs(t))
    if f.truncation != f.valuation:
        # the last known terms times a geometric factor estimate the tail
        decay = mpmath.exp(-2 * mpmath.pi * z.imag / f.ramification)
        if decay >= 1:
            raise TailBoundUnsatisfiable("series does not converge at this point")
        tail_est = max(last[-3:], default=mpmath.mpf(0))
        bound = tail_est * decay / (1 - decay)
        if bound > mpmath.mpf(2) ** (-ctx.prec // 2) * max(1, abs(total)):
            raise TailBoundUnsatisfiable(
                f"truncation q^{f.truncation} leaves a tail of about {mpmath.nstr(bound, 3)}"
            )
    return total * factor
