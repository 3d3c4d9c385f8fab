"""Reduction of a weight-k form to a polynomial in j via g_f = f^12 / Delta^k."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import mpmath

from .errors import InsufficientTruncation, NonInvertible, NotPolynomial
from .forms import delta, jfunction
from .qseries import QSeries

__all__ = [
    "JPolynomial", "extract_pf", "evaluate_pf", "IntegralityReport",
    "integrality_report", "equivalent", "polynomial_in_j",
]


@dataclass(frozen=True)
class JPolynomial:
    """Exact polynomial sum coeffs[i] X^i together with its source data."""

    coeffs: tuple
    weight: int
    valuation: int = 0

    def __post_init__(self):
        cs = tuple(Fraction(c) for c in self.coeffs)
        while len(cs) > 1 and cs[-1] == 0:
            cs = cs[:-1]
        object.__setattr__(self, "coeffs", cs or (Fraction(0),))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1]

    def __call__(self, x):
        """Exact Horner evaluation at a rational (or any ring element)."""
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def to_json_obj(self) -> dict:
        return {"weight": self.weight, "coeffs": [str(c) for c in self.coeffs]}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: dict) -> "JPolynomial":
        return cls(tuple(Fraction(c) for c in obj["coeffs"]), int(obj["weight"]))

    def __str__(self):
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0 and self.degree > 0:
                continue
            mono = "" if i == 0 else ("X" if i == 1 else f"X^{i}")
            if mono and c == 1:
                parts.append(mono)
            elif mono and c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts).replace("+ -", "- ")


def _eliminate(g: QSeries, d: int) -> list[Fraction]:
    """Peel j^m off the most negative exponent, m = d..0; verify the remainder."""
    T = int(g.truncation)
    j = jfunction(T + d + 1)
    powers = [QSeries.from_terms({0: 1}, T + d + 1)]
    for _ in range(d):
        powers.append(powers[-1] * j)
    residual = g
    coeffs = [Fraction(0)] * (d + 1)
    for m in range(d, -1, -1):
        c = residual.coefficient(-m)
        coeffs[m] = c
        if c:
            residual = residual - powers[m].scale(c)
    residual = residual.truncate(g.truncation)
    if not residual.is_zero:
        e, c = next(residual.terms())
        if e < 0:
            raise NotPolynomial(f"pole q^{e} remains after elimination")
        raise NotPolynomial(f"residual {c}*q^{e} does not vanish: not a polynomial in j")
    return coeffs


def extract_pf(f: QSeries, k: int) -> JPolynomial:
    """The polynomial P_f with f^12 / Delta^k = P_f(j), certified by re-substitution."""
    if f.ramification != 1:
        raise ValueError("extract_pf needs integral exponents")
    if k % 2:
        raise ValueError("weight must be even")
    if f.is_zero:
        raise NonInvertible("the zero form has no associated polynomial")
    n0 = int(f.valuation)
    d = k - 12 * n0
    if d < 0:
        raise NotPolynomial(f"f^12/Delta^k vanishes at the cusp to order {-d}")
    rel = int(f.truncation) - n0
    g = (f**12) * (delta(rel + 2) ** (-k))
    if g.truncation < 1:
        raise InsufficientTruncation(
            f"need truncation >= {d + n0 + 1} for weight {k}, got {f.truncation}"
        )
    return JPolynomial(tuple(_eliminate(g, d)), k, n0)


def polynomial_in_j(f: QSeries, k: int) -> JPolynomial:
    """For 12 | k: the polynomial Q with f = Delta^(k/12) Q(j), so P_f = Q^12."""
    if k % 12:
        raise ValueError("polynomial_in_j needs 12 | k")
    n0 = int(f.valuation)
    d = k // 12 - n0
    if d < 0:
        raise NotPolynomial("f / Delta^(k/12) vanishes at the cusp")
    rel = int(f.truncation) - n0
    g = f * (delta(rel + 2) ** (-(k // 12)))
    if g.truncation < 1:
        raise InsufficientTruncation(f"need truncation >= {d + n0 + 1}")
    return JPolynomial(tuple(_eliminate(g, d)), k, n0)


def evaluate_pf(P: JPolynomial, x):
    """Horner evaluation at the current mpmath working precision."""
    x = mpmath.mpmathify(x)
    acc = mpmath.mpf(0)
    for c in reversed(P.coeffs):
        acc = acc * x + mpmath.mpf(c.numerator) / c.denominator
    return acc


@dataclass
class IntegralityReport:
    leading_integral: bool
    all_integral: bool
    offending_indices: list = field(default_factory=list)

    @property
    def verdict(self) -> str:
        if self.all_integral:
            return "all-integral"
        if self.leading_integral:
            return "transcendental zero guaranteed"
        return "hypotheses not met"

    def to_json_obj(self) -> dict:
        return {
            "leading_integral": self.leading_integral,
            "all_integral": self.all_integral,
            "offending_indices": list(self.offending_indices),
            "verdict": self.verdict,
        }


def integrality_report(P: JPolynomial) -> IntegralityReport:
    """Integrality of P_f: an integral leading term with some non-integral
    coefficient forces a zero with non-algebraic-integer j-value."""
    lead = P.leading
    offending = [i for i, c in enumerate(P.coeffs) if c.denominator != 1]
    return IntegralityReport(
        leading_integral=lead != 0 and lead.denominator == 1,
        all_integral=not offending,
        offending_indices=offending,
    )


def equivalent(f: QSeries, k1: int, g: QSeries, k2: int, min_terms: int = 8):
    """Return lambda with f^a = lambda g^b (a, b from the weights) or None."""
    if f.is_zero or g.is_zero:
        raise NonInvertible("equivalence is only defined for nonzero forms")
    if k1 == 0 and k2 == 0:
        vf, vg = f.valuation, g.valuation
        if vf == 0 or vg == 0:
            if vf != vg:
                return None
            a, b = 1, 1
        else:
            if (vf > 0) != (vg > 0):
                return None
            n = gcd(abs(vf.numerator), abs(vg.numerator))
            a, b = abs(vg.numerator) // n, abs(vf.numerator) // n
    elif k1 == 0 or k2 == 0:
        return None
    else:
        if (k1 > 0) != (k2 > 0):
            return None
        n = gcd(abs(k1), abs(k2))
        a, b = abs(k2) // n, abs(k1) // n
    F = f**a
    G = g**b
    if F.valuation != G.valuation:
        return None
    lam = F.leading_coefficient / G.leading_coefficient
    diff = F - G.scale(lam)
    compared = diff.truncation - F.valuation
    if diff.is_zero and compared < min_terms:
        raise InsufficientTruncation(f"only {compared} coefficients compared, need {min_terms}")
    return lam if diff.is_zero else None
