from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from mfzl.errors import InsufficientTruncation, NotPolynomial
from mfzl.expr import Delta, parse_form
from mfzl.forms import delta, eisenstein, eisenstein2, expand, jfunction
from mfzl.jpoly import (
    JPolynomial, equivalent, evaluate_pf, extract_pf, integrality_report, polynomial_in_j,
)
from mfzl.qseries import QSeries

# -- an independent oracle: dense lists + a sympy linear solve ----------------


def _mul(a, b, n):
    out = [Fraction(0)] * n
    for i, x in enumerate(a[:n]):
        if x:
            for k, y in enumerate(b[: n - i]):
                out[i + k] += x * y
    return out


def _inv(a, n):
    # a[0] != 0
    out = [Fraction(0)] * n
    out[0] = 1 / Fraction(a[0])
    for m in range(1, n):
        s = sum(a[i] * out[m - i] for i in range(1, min(m, len(a) - 1) + 1))
        out[m] = -s / a[0]
    return out


def _pow(a, e, n):
    out = [Fraction(1)] + [Fraction(0)] * (n - 1)
    for _ in range(e):
        out = _mul(out, a, n)
    return out


def oracle_pf(f_coeffs, n0, k, n):
    """P with f^12/Delta^k = P(j), via a linear system on q^-d .. q^0 (n terms)."""
    d = k - 12 * n0
    e4 = [Fraction(1)] + [Fraction(240 * int(sympy.divisor_sigma(m, 3))) for m in range(1, n + d + 2)]
    # Delta / q = prod (1 - q^m)^24
    dq = [Fraction(1)] + [Fraction(0)] * (n + d + 1)
    for m in range(1, n + d + 2):
        for _ in range(24):
            for i in range(n + d + 1, m - 1, -1):
                dq[i] -= dq[i - m]
    L = n + d + 2
    jq = _mul(_pow(e4, 3, L), _inv(dq, L), L)  # q * j
    # f^12 / Delta^k = q^(12 n0 - k) * (f/q^n0)^12 / (Delta/q)^k
    g = _mul(_pow(f_coeffs, 12, L), _pow(_inv(dq, L), k, L), L) if k >= 0 else \
        _mul(_pow(f_coeffs, 12, L), _pow(dq, -k, L), L)
    # q^d * j^m = (q j)^m * q^(d - m)
    cols = []
    for m in range(d + 1):
        col = [Fraction(0)] * (d - m) + _pow(jq, m, L)
        cols.append(col[: d + 1])
    A = sympy.Matrix(d + 1, d + 1, lambda r, c: sympy.Rational(cols[c][r].numerator, cols[c][r].denominator))
    rhs = sympy.Matrix(d + 1, 1, lambda r, c: sympy.Rational(g[r].numerator, g[r].denominator))
    sol = A.LUsolve(rhs)
    return [Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1])) for x in sol]


def _dense(s: QSeries, n):
    v = int(s.valuation)
    return [s[v + i] for i in range(n)], v


@pytest.mark.parametrize(
    "text",
    ["Ek(4)", "Ek(6)", "Ek(8)", "Ek(10)", "Ek(12)", "Delta", "mul(Ek(4), Ek(6))",
     "mul(Delta, sub(J, const(1/2)))", "scale(1/2, mul(Delta, sub(J, const(1728))))",
     "add(Ek(12), scale(5, Delta))"],
)
def test_extract_pf_matches_linear_solve_oracle(text):
    expr = parse_form(text)
    k = expr.weight
    f = expand(expr, k + 4)
    coeffs, n0 = _dense(f, k + 2)
    assert list(extract_pf(f, k).coeffs) == oracle_pf(coeffs, n0, k, k + 2)


def test_known_polynomials():
    assert extract_pf(eisenstein(4, 20), 4).coeffs == (0, 0, 0, 0, 1)
    P6 = extract_pf(eisenstein(6, 20), 6)
    X = sympy.symbols("X")
    assert sympy.Poly(list(reversed(P6.coeffs)), X) == sympy.Poly((X - 1728) ** 6, X)
    assert extract_pf(delta(20), 12).coeffs == (1,)
    # weight 12 forms are Delta times a polynomial of degree one in j
    assert polynomial_in_j(eisenstein(12, 20), 12).coeffs == (Fraction(-432000, 691), 1)


def test_cube_of_e4():
    # f = E4^3 has weight 12 and P_f = j^12
    P = extract_pf(eisenstein(4, 30) ** 3, 12)
    assert P.coeffs == tuple([0] * 12 + [1])
    assert polynomial_in_j(eisenstein(4, 30) ** 3, 12).coeffs == (0, 1)


def test_not_polynomial_for_quasimodular():
    with pytest.raises(NotPolynomial):
        extract_pf(eisenstein2(40), 2)


def test_insufficient_truncation():
    with pytest.raises(InsufficientTruncation):
        extract_pf(eisenstein(4, 4), 4)


def test_evaluate_pf_horner():
    mpmath.mp.prec = 128
    P = JPolynomial((1, -3, 2), 0)
    assert evaluate_pf(P, 5) == 36
    assert P(Fraction(1, 2)) == 0


def test_integrality_reports():
    f = expand(parse_form("mul(Delta, sub(J, const(1/2)))"), 20)
    r = integrality_report(extract_pf(f, 12))
    assert r.leading_integral and not r.all_integral
    assert r.verdict == "transcendental zero guaranteed"
    g = expand(parse_form("scale(1/2, mul(Delta, sub(J, const(1728))))"), 20)
    assert integrality_report(extract_pf(g, 12)).verdict == "hypotheses not met"
    assert integrality_report(extract_pf(delta(20), 12)).verdict == "all-integral"


def test_equivalence():
    d = delta(20)
    assert equivalent(expand(2 * Delta, 20), 12, d, 12) == 2
    assert equivalent(eisenstein(4, 30), 4, eisenstein(6, 30), 6) is None
    assert equivalent(eisenstein(4, 30) ** 3, 12, eisenstein(4, 30), 4) == 1
    with pytest.raises(InsufficientTruncation):
        equivalent(delta(4), 12, delta(4), 12)


def test_json_round_trip():
    P = extract_pf(eisenstein(6, 20), 6)
    assert JPolynomial.from_json_obj(P.to_json_obj()) == P


def _form_from_poly(P, N):
    d = len(P) - 1
    j = jfunction(N + d)
    acc = QSeries.zero(N)
    jp = QSeries.one(N + d)
    for c in P:
        acc = acc + jp * c
        jp = jp * j
    return (acc * delta(N + 2) ** d).truncate(N)


@given(
    st.lists(st.integers(-1000, 1000), min_size=0, max_size=4),
    st.integers(1, 1000),
    st.sampled_from([1, -1]),
)
def test_round_trip_property(lower, lead, sign):
    P = lower + [sign * lead]
    d = len(P) - 1
    f = _form_from_poly(P, 12 * d + 2)
    assert polynomial_in_j(f, 12 * d).coeffs == tuple(map(Fraction, P))
    P12 = sympy.Poly(list(reversed(P)), sympy.symbols("X")) ** 12
    assert extract_pf(f, 12 * d).coeffs == tuple(Fraction(int(c)) for c in reversed(P12.all_coeffs()))
