"""Truncated Puiseux series in q^(1/r) with exact rational coefficients.

A series is stored densely: coefficient ``coeffs[i]`` belongs to the exponent
``(val + i) / r`` and every exponent below ``prec / r`` is known.  Exponents at
or above the truncation are unknown, never assumed zero.
"""
from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd, lcm

from .errors import DivisionByZeroSeries, InsufficientTruncation, NonInvertible

__all__ = ["QSeries", "sigma", "bernoulli"]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def sigma(k: int, n: int) -> int:
    """Divisor power sum: sum of d**k over the positive divisors d of n."""
    if n < 1 or k < 0:
        raise ValueError("sigma needs n >= 1 and k >= 0")
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d**k
            e = n // d
            if e != d:
                total += e**k
        d += 1
    return total


@lru_cache(maxsize=None)
def _bernoulli_table(m: int) -> tuple[Fraction, ...]:
    # sum_{j=0}^{n} C(n+1, j) B_j = 0 for n >= 1, B_0 = 1
    table = [Fraction(1)]
    for n in range(1, m + 1):
        s = sum(comb(n + 1, j) * table[j] for j in range(n))
        table.append(-s / (n + 1))
    return tuple(table)


def bernoulli(k: int) -> Fraction:
    """Exact Bernoulli number B_k (B_1 = -1/2 convention)."""
    if k < 0:
        raise ValueError("bernoulli needs k >= 0")
    return _bernoulli_table(k)[k]


def _common_denominator(values) -> int:
    den = 1
    for v in values:
        if v.denominator != 1:
            den = lcm(den, v.denominator)
    return den


def _convolve(a: list, b: list, length: int) -> list:
    """First ``length`` terms of the Cauchy product of two coefficient lists."""
    out = []
    la, lb = len(a), len(b)
    for n in range(length):
        lo = max(0, n - lb + 1)
        hi = min(n, la - 1)
        s = 0
        for i in range(lo, hi + 1):
            ai = a[i]
            if ai:
                s += ai * b[n - i]
        out.append(s)
    return out


class QSeries:
    """Immutable truncated Puiseux series ``sum c_e q^e + O(q^N)``."""

    __slots__ = ("_r", "_val", "_prec", "_coeffs")

    def __init__(self, coeffs, val: int = 0, prec: int | None = None, r: int = 1):
        """Low-level constructor on integer indices (exponent = index / r)."""
        if r < 1:
            raise ValueError("ramification must be positive")
        cs = [_frac(c) for c in coeffs]
        if prec is None:
            prec = val + len(cs)
        if prec < val + len(cs):
            cs = cs[: max(0, prec - val)]
        elif prec > val + len(cs):
            # explicit zeros up to the truncation
            cs = cs + [Fraction(0)] * (prec - val - len(cs))
        start = 0
        while start < len(cs) and cs[start] == 0:
            start += 1
        cs = cs[start:]
        val += start
        if not cs:
            val = prec
        # collapse ramification when every nonzero exponent allows it
        g = r
        for i, c in enumerate(cs):
            if c:
                g = gcd(g, val + i)
                if g == 1:
                    break
        if cs and g > 1:
            new_prec = prec // g
            cs = [cs[i] for i in range(0, (new_prec * g) - val, g)] if new_prec * g > val else []
            val //= g
            prec = new_prec
            r //= g
            if not cs:
                val = prec
        elif not cs and prec % r == 0 and r > 1:
            prec //= r
            val = prec
            r = 1
        self._r = r
        self._val = val
        self._prec = prec
        self._coeffs = tuple(cs)

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_terms(cls, terms, truncation) -> "QSeries":
        """Build from a mapping or iterable of (exponent, coefficient) pairs."""
        items = terms.items() if isinstance(terms, dict) else terms
        items = [(_frac(e), _frac(c)) for e, c in items]
        trunc = _frac(truncation)
        r = trunc.denominator
        for e, _ in items:
            r = lcm(r, e.denominator)
        prec = int(trunc * r)
        data = {}
        for e, c in items:
            idx = int(e * r)
            if idx < prec:
                data[idx] = data.get(idx, Fraction(0)) + c
        nonzero = [i for i, c in data.items() if c]
        if not nonzero:
            return cls([], prec, prec, r)
        val = min(nonzero)
        cs = [data.get(i, Fraction(0)) for i in range(val, prec)]
        return cls(cs, val, prec, r)

    @classmethod
    def from_coefficients(cls, coeffs, valuation: int = 0, truncation: int | None = None) -> "QSeries":
        """Integer-exponent series ``sum coeffs[i] q^(valuation + i)``."""
        return cls(coeffs, valuation, truncation, 1)

    @classmethod
    def zero(cls, truncation) -> "QSeries":
        return cls.from_terms({}, truncation)

    @classmethod
    def one(cls, truncation) -> "QSeries":
        return cls.from_terms({0: 1}, truncation)

    @classmethod
    def monomial(cls, exponent, coefficient, truncation) -> "QSeries":
        return cls.from_terms({exponent: coefficient}, truncation)

    # -- accessors --------------------------------------------------------
    @property
    def ramification(self) -> int:
        return self._r

    @property
    def valuation(self) -> Fraction:
        return Fraction(self._val, self._r)

    @property
    def truncation(self) -> Fraction:
        return Fraction(self._prec, self._r)

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def leading_coefficient(self) -> Fraction:
        if not self._coeffs:
            raise NonInvertible("series is zero up to its truncation")
        return self._coeffs[0]

    def coefficient(self, exponent) -> Fraction:
        e = _frac(exponent)
        if e >= self.truncation:
            raise InsufficientTruncation(f"coefficient of q^{e} lies beyond truncation {self.truncation}")
        scaled = e * self._r
        if scaled.denominator != 1:
            return Fraction(0)
        idx = int(scaled) - self._val
        if idx < 0:
            return Fraction(0)
        return self._coeffs[idx]

    def __getitem__(self, exponent) -> Fraction:
        return self.coefficient(exponent)

    def terms(self):
        """Nonzero (exponent, coefficient) pairs in increasing exponent order."""
        for i, c in enumerate(self._coeffs):
            if c:
                yield Fraction(self._val + i, self._r), c

    def has_integral_exponents(self) -> bool:
        return self._r == 1

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self._coeffs)

    # -- internal helpers -------------------------------------------------
    def _at_ramification(self, r: int) -> tuple[int, int, list]:
        """(val, prec, dense coeffs) re-indexed for ramification ``r``."""
        f = r // self._r
        if f == 1:
            return self._val, self._prec, list(self._coeffs)
        cs = [Fraction(0)] * (len(self._coeffs) * f)
        for i, c in enumerate(self._coeffs):
            cs[i * f] = c
        if not self._coeffs:
            return self._prec * f, self._prec * f, []
        return self._val * f, self._prec * f, cs[: (self._prec - self._val) * f]

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._add_constant(_frac(other))
        if not isinstance(other, QSeries):
            return NotImplemented
        r = lcm(self._r, other._r)
        va, pa, ca = self._at_ramification(r)
        vb, pb, cb = other._at_ramification(r)
        prec = min(pa, pb)
        v = min(va, vb)
        if v >= prec:
            return QSeries([], prec, prec, r)
        out = [Fraction(0)] * (prec - v)
        for i, c in enumerate(ca):
            if va + i < prec:
                out[va + i - v] += c
        for i, c in enumerate(cb):
            if vb + i < prec:
                out[vb + i - v] += c
        return QSeries(out, v, prec, r)

    __radd__ = __add__

    def _add_constant(self, c: Fraction) -> "QSeries":
        if c == 0:
            return self
        if self._prec <= 0:
            raise InsufficientTruncation("constant term lies beyond the truncation")
        v = min(self._val, 0)
        out = [Fraction(0)] * (self._prec - v)
        for i, x in enumerate(self._coeffs):
            out[self._val + i - v] = x
        out[-v] += c
        return QSeries(out, v, self._prec, self._r)

    def __neg__(self):
        return QSeries([-c for c in self._coeffs], self._val, self._prec, self._r)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._add_constant(-_frac(other))
        if not isinstance(other, QSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "QSeries":
        c = _frac(c)
        if c == 0:
            return QSeries([], self._prec, self._prec, self._r)
        return QSeries([c * x for x in self._coeffs], self._val, self._prec, self._r)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        r = lcm(self._r, other._r)
        va, pa, ca = self._at_ramification(r)
        vb, pb, cb = other._at_ramification(r)
        prec = min(pa + vb, pb + va)
        v = va + vb
        length = prec - v
        if not ca or not cb or length <= 0:
            return QSeries([], prec, prec, r)
        da = _common_denominator(ca)
        db = _common_denominator(cb)
        ia = [int(c * da) for c in ca[:length]]
        ib = [int(c * db) for c in cb[:length]]
        prod = _convolve(ia, ib, length)
        den = da * db
        return QSeries([Fraction(x, den) for x in prod], v, prec, r)

    __rmul__ = __mul__

    def inverse(self) -> "QSeries":
        if not self._coeffs:
            raise NonInvertible("cannot invert a series that is zero up to its truncation")
        n = self._prec - self._val
        den = _common_denominator(self._coeffs)
        ints = [int(c * den) for c in self._coeffs]
        a0 = ints[0]
        # unit part u = ints / a0; its inverse d satisfies sum ints[i] d[n-i] = 0
        if abs(a0) == 1:
            d = [a0]
            for m in range(1, n):
                s = 0
                for i in range(1, m + 1):
                    if ints[i]:
                        s += ints[i] * d[m - i]
                d.append(-s * a0)
            out = [Fraction(x * den) for x in d]
        else:
            d = [Fraction(1, a0)]
            for m in range(1, n):
                s = 0
                for i in range(1, m + 1):
                    if ints[i]:
                        s += ints[i] * d[m - i]
                d.append(-s / a0)
            out = [x * den for x in d]
        return QSeries(out, -self._val, self._prec - 2 * self._val, self._r)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZeroSeries("division by the zero constant")
            return self.scale(1 / _frac(other))
        if not isinstance(other, QSeries):
            return NotImplemented
        if other.is_zero:
            raise DivisionByZeroSeries("divisor is zero up to its truncation")
        return self * other.inverse()

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if self.is_zero:
                raise DivisionByZeroSeries("divisor is zero up to its truncation")
            return self.inverse().scale(other)
        return NotImplemented

    def __pow__(self, m: int):
        if not isinstance(m, int):
            return NotImplemented
        if m < 0:
            if self.is_zero:
                raise NonInvertible("negative power of a series without leading coefficient")
            return self.inverse() ** (-m)
        if m == 0:
            return QSeries.from_terms({0: 1}, self.truncation - self.valuation)
        result = None
        base = self
        while m:
            if m & 1:
                result = base if result is None else result * base
            m >>= 1
            if m:
                base = base * base
        return result

    # -- substitutions ----------------------------------------------------
    def subst(self, m: int) -> "QSeries":
        """q -> q^m for a positive integer m (so f(z) -> f(mz))."""
        if m < 1:
            raise ValueError("substitution exponent must be positive")
        cs = [Fraction(0)] * (len(self._coeffs) * m)
        for i, c in enumerate(self._coeffs):
            cs[i * m] = c
        return QSeries(cs, self._val * m, self._prec * m, self._r)

    def ramify(self, m: int) -> "QSeries":
        """q -> q^(1/m) (so f(z) -> f(z/m))."""
        if m < 1:
            raise ValueError("ramification factor must be positive")
        return QSeries(self._coeffs, self._val, self._prec, self._r * m)

    def shift(self, exponent) -> "QSeries":
        """Multiply by q^exponent."""
        e = _frac(exponent)
        r = lcm(self._r, e.denominator)
        v, p, cs = self._at_ramification(r)
        s = int(e * r)
        return QSeries(cs, v + s, p + s, r)

    def truncate(self, truncation) -> "QSeries":
        t = _frac(truncation)
        if t >= self.truncation:
            return self
        r = lcm(self._r, t.denominator)
        v, p, cs = self._at_ramification(r)
        newp = int(t * r)
        return QSeries(cs[: max(0, newp - v)], min(v, newp), newp, r)

    def multisection(self, m: int, residue: int) -> "QSeries":
        """Keep exponents e with e*r congruent to ``residue`` mod m (r = ramification)."""
        cs = [c if (self._val + i) % m == residue % m else Fraction(0) for i, c in enumerate(self._coeffs)]
        return QSeries(cs, self._val, self._prec, self._r)

    # -- comparison / display ---------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return (self._r, self._val, self._prec, self._coeffs) == (other._r, other._val, other._prec, other._coeffs)

    def __hash__(self):
        return hash((self._r, self._val, self._prec, self._coeffs))

    def agrees_with(self, other: "QSeries") -> bool:
        """True when both series coincide up to the smaller truncation."""
        t = min(self.truncation, other.truncation)
        return (self.truncate(t) - other.truncate(t)).is_zero

    def __repr__(self):
        parts = []
        for e, c in self.terms():
            if e == 0:
                parts.append(f"{c}")
            else:
                parts.append(f"{c}*q^{e}" if e != 1 else f"{c}*q")
            if len(parts) >= 6:
                parts.append("...")
                break
        body = " + ".join(parts) if parts else "0"
        return f"QSeries({body} + O(q^{self.truncation}))"

    def to_json_obj(self) -> dict:
        return {
            "ramification": self._r,
            "truncation": str(self.truncation),
            "terms": [[int(e) if e.denominator == 1 else str(e), str(c)] for e, c in self.terms()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: dict) -> "QSeries":
        # ramification is recomputed canonically from exponents and truncation
        return cls.from_terms([(Fraction(str(e)), Fraction(c)) for e, c in obj["terms"]], Fraction(obj["truncation"]))

    @classmethod
    def from_json(cls, text: str) -> "QSeries":
        return cls.from_json_obj(json.loads(text))
