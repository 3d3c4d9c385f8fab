"""q-expansions of the named forms, expression expansion and coset (slash) expansions."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import ceil

from .errors import InsufficientTruncation, RamificationLeak, UnknownTransform
from .expr import Const, FormExpr, Gen, Power, Product, Scalar, Sum
from .qseries import QSeries, bernoulli, sigma

__all__ = [
    "eisenstein", "eisenstein2", "delta", "jfunction", "fricke_eisenstein",
    "expand", "CosetRep", "coset_reps", "TwistedSeries", "slash_expand",
    "slash_s_expand", "coset_product",
]


@lru_cache(maxsize=None)
def _eisenstein_cached(k: int, n: int) -> QSeries:
    c = Fraction(-2 * k) / bernoulli(k)
    coeffs = [Fraction(1)] + [c * sigma(k - 1, m) for m in range(1, n)]
    return QSeries.from_coefficients(coeffs, 0, n)


def eisenstein(k: int, N: int) -> QSeries:
    """E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n, truncated at q^N."""
    if k < 4 or k % 2:
        raise ValueError("eisenstein needs even k >= 4")
    return _eisenstein_cached(k, max(int(N), 1))


def eisenstein2(N: int) -> QSeries:
    """The quasimodular E_2 = 1 - 24 sum sigma_1(n) q^n."""
    N = max(int(N), 1)
    coeffs = [1] + [-24 * sigma(1, m) for m in range(1, N)]
    return QSeries.from_coefficients(coeffs, 0, N)


@lru_cache(maxsize=None)
def _delta_cached(N: int) -> QSeries:
    # q * prod_{n < N} (1 - q^n)^24, only q^0..q^{N-2} of the product matter
    length = max(N - 1, 0)
    poly = [0] * length
    if length:
        poly[0] = 1
    for n in range(1, length):
        for _ in range(24):
            for i in range(length - 1, n - 1, -1):
                poly[i] -= poly[i - n]
    return QSeries.from_coefficients(poly, 1, N)


def delta(N: int) -> QSeries:
    return _delta_cached(max(int(N), 1))


@lru_cache(maxsize=None)
def _j_cached(N: int) -> QSeries:
    e4 = eisenstein(4, N + 2)
    e6 = eisenstein(6, N + 2)
    e43 = e4**3
    j = (e43 * 1728) / (e43 - e6 * e6)
    return j.truncate(N)


def jfunction(N: int) -> QSeries:
    """j = 1728 E4^3 / (E4^3 - E6^2), a Laurent series starting at q^-1."""
    return _j_cached(max(int(N), 0))


def fricke_eisenstein(k: int, p: int, N: int) -> QSeries:
    """E_{k,p} = (p^(k/2) E_k(pz) + E_k(z)) / (p^(k/2) + 1)."""
    if k % 2:
        raise ValueError("fricke_eisenstein needs even k")
    w = p ** (k // 2)
    ek = eisenstein(k, N)
    scaled = eisenstein(k, ceil(N / p)).subst(p)
    return ((scaled * w + ek) / (w + 1)).truncate(N)


# -- expression expansion -----------------------------------------------------

def _gen_series(g: Gen, M: int) -> QSeries:
    if g.kind == "Ek":
        return eisenstein(g.k, M)
    if g.kind == "EkScaled":
        return eisenstein(g.k, ceil(M / g.p)).subst(g.p)
    if g.kind == "Delta":
        return delta(M)
    if g.kind == "DeltaScaled":
        return delta(ceil(M / g.p)).subst(g.p)
    return jfunction(M)


def _gen_s_series(g: Gen, M: int, p: int) -> QSeries:
    """Expansion of g|S at i-infinity in powers of q^(1/p)."""
    if g.kind in ("Ek", "Delta", "J"):
        return _gen_series(g, M)
    if g.p != p:
        raise UnknownTransform(f"{g} has no S-transform at level {p}")
    if g.kind == "EkScaled":
        # E_k(pz)|S = p^-k E_k(z/p)
        return eisenstein(g.k, M * p).ramify(p).scale(Fraction(1, p**g.k))
    # Delta(pz)|S = p^-12 Delta(z/p)
    return delta(M * p).ramify(p).scale(Fraction(1, p**12))


def _eval_tree(e: FormExpr, M: int, leaf) -> QSeries:
    if isinstance(e, Gen):
        return leaf(e, M)
    if isinstance(e, Const):
        return QSeries.from_terms({0: e.value}, M)
    if isinstance(e, Scalar):
        return _eval_tree(e.expr, M, leaf).scale(e.c)
    if isinstance(e, Power):
        return _eval_tree(e.base, M, leaf) ** e.n
    if isinstance(e, Product):
        out = None
        for f in e.factors:
            s = _eval_tree(f, M, leaf)
            out = s if out is None else out * s
        return out
    if isinstance(e, Sum):
        out = None
        for t in e.terms:
            s = _eval_tree(t, M, leaf)
            out = s if out is None else out + s
        return out
    raise TypeError(f"not a form expression: {e!r}")


def _expand_with(expr: FormExpr, N, leaf) -> QSeries:
    N = Fraction(N)
    slack = 4
    for _ in range(8):
        s = _eval_tree(expr, int(ceil(N)) + slack, leaf)
        if s.truncation >= N:
            return s.truncate(N)
        slack = 2 * slack + int(ceil(N - s.truncation))
    raise InsufficientTruncation(f"could not reach truncation {N} for {expr}")


def expand(expr: FormExpr, N) -> QSeries:
    """Exact q-expansion of ``expr`` at the cusp i-infinity, truncated at q^N."""
    return _expand_with(expr, N, _gen_series)


# -- coset expansions ---------------------------------------------------------

@dataclass(frozen=True)
class CosetRep:
    """One of the p+1 right coset representatives I, S T^n (0 <= n < p)."""

    p: int
    n: int | None = None  # None stands for the identity

    def __post_init__(self):
        if self.n is not None and not 0 <= self.n < self.p:
            raise ValueError("coset index must satisfy 0 <= n < p")

    @property
    def matrix(self) -> tuple[tuple[int, int], tuple[int, int]]:
        if self.n is None:
            return ((1, 0), (0, 1))
        # S T^n = [[0,-1],[1,0]] [[1,n],[0,1]]
        return ((0, -1), (1, self.n))

    def __str__(self):
        if self.n is None:
            return "I"
        return "S" if self.n == 0 else f"ST^{self.n}"


def coset_reps(p: int) -> list[CosetRep]:
    return [CosetRep(p)] + [CosetRep(p, n) for n in range(p)]


@dataclass(frozen=True)
class TwistedSeries:
    """f|S(z + n): the coefficient of q^e in ``base`` is multiplied by exp(2 pi i n e).

    The twist introduces p-th roots of unity, so it is kept symbolic; use
    :meth:`coefficient` for the exact (rational, root-of-unity) pair.
    """

    base: QSeries
    n: int
    p: int

    def coefficient(self, exponent) -> tuple[Fraction, Fraction]:
        """(c, t) meaning c * exp(2 pi i t) with t reduced mod 1."""
        e = Fraction(exponent)
        return self.base.coefficient(e), (self.n * e) % 1

    @property
    def truncation(self):
        return self.base.truncation

    @property
    def ramification(self):
        return self.base.ramification


def slash_s_expand(expr: FormExpr, p: int, N) -> QSeries:
    """Exact expansion of expr|S in powers of q^(1/p)."""
    return _expand_with(expr, N, lambda g, M: _gen_s_series(g, M, p))


def slash_expand(expr: FormExpr, rep: CosetRep, N):
    """Expansion of expr|rep; a :class:`TwistedSeries` for S T^n with n != 0."""
    if rep.n is None:
        return expand(expr, N)
    base = slash_s_expand(expr, rep.p, N)
    if rep.n == 0:
        return base
    return TwistedSeries(base, rep.n, rep.p)


def _det(matrix: list[list[QSeries]]) -> QSeries:
    n = len(matrix)
    total = None
    for perm in permutations(range(n)):
        sign = 1
        seen = list(perm)
        for i in range(n):
            for j in range(i + 1, n):
                if seen[i] > seen[j]:
                    sign = -sign
        term = None
        for i, j in enumerate(perm):
            term = matrix[i][j] if term is None else term * matrix[i][j]
        if sign < 0:
            term = -term
        total = term if total is None else total + term
    return total


def coset_product(expr: FormExpr, N) -> QSeries:
    """prod over Gamma_0(p)\\Gamma of expr|gamma, as a level-one q-series.

    The product over the p twists of f|S equals the determinant of the
    circulant matrix built from the p multisections of f|S, which keeps the
    computation inside rational arithmetic.  Integrality of the exponents of
    the result is checked, not assumed.
    """
    p = expr.level
    if p == 1:
        raise ValueError("coset_product needs a level-p expression (p > 1)")
    N = Fraction(N)
    fi = expand(expr, N + 2)
    fs = slash_s_expand(expr, p, N + 2)
    trunc = fs.truncation
    parts = [{} for _ in range(p)]
    for e, c in fs.terms():
        idx = e * p
        if idx.denominator != 1:
            raise RamificationLeak(f"f|S has exponent {e} outside (1/{p})Z")
        parts[int(idx) % p][e] = c
    ys = [QSeries.from_terms(parts[r], trunc) for r in range(p)]
    circ = [[ys[(col - row) % p] for col in range(p)] for row in range(p)]
    prod = fi * _det(circ)
    leaks = [e for e, c in prod.terms() if e.denominator != 1]
    if leaks or prod.ramification != 1:
        raise RamificationLeak(f"fractional exponents survive in the coset product: {leaks[:5]}")
    if prod.truncation < N:
        raise InsufficientTruncation(f"coset product only known to q^{prod.truncation}")
    return prod.truncate(N)
