from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from mfzl.errors import DivisionByZeroSeries, InsufficientTruncation, NonInvertible
from mfzl.qseries import QSeries, bernoulli, sigma


def brute_sigma(k, n):
    return sum(d**k for d in range(1, n + 1) if n % d == 0)


@pytest.mark.parametrize("k", [0, 1, 3, 5, 7, 11])
def test_sigma_matches_brute_force(k):
    for n in range(1, 60):
        assert sigma(k, n) == brute_sigma(k, n)


def test_sigma_examples():
    assert sigma(1, 6) == 12
    assert sigma(3, 2) == 9


@pytest.mark.parametrize("k", range(2, 42, 2))
def test_bernoulli_matches_sympy(k):
    assert bernoulli(k) == Fraction(str(sympy.bernoulli(k)))


def test_bernoulli_examples():
    assert bernoulli(2) == Fraction(1, 6)
    assert bernoulli(12) == Fraction(-691, 2730)


rationals = st.fractions(min_value=-50, max_value=50, max_denominator=12)


@st.composite
def series(draw, integral=True):
    val = draw(st.integers(-3, 3))
    n = draw(st.integers(1, 8))
    coeffs = draw(st.lists(rationals, min_size=n, max_size=n))
    r = 1 if integral else draw(st.integers(1, 3))
    return QSeries(coeffs, val * r, val * r + n, r)


def test_basic_products():
    a = QSeries.from_terms({0: 1, 1: 1}, 5)
    b = QSeries.from_terms({0: 1, 1: -1}, 5)
    assert dict((a * b).terms()) == {0: 1, 2: -1}
    half = QSeries.from_terms({Fraction(1, 2): 1}, 3)
    sq = half * half
    assert sq.ramification == 1
    assert dict(sq.terms()) == {1: 1}


def test_geometric_inverse():
    s = QSeries.from_terms({0: 1, 1: -1}, 10)
    inv = s.inverse()
    assert [inv[n] for n in range(10)] == [1] * 10


def test_truncation_propagation():
    a = QSeries.from_coefficients([1, 2, 3], 0, 10)
    b = QSeries.from_coefficients([1, 1], 2, 6)
    assert (a * b).truncation == min(10 + 2, 6 + 0)
    assert (a + b).truncation == 6
    c = QSeries.from_coefficients([2, 1], -1, 5)
    assert c.inverse().truncation == 5 - 2 * (-1)


def test_coefficient_beyond_truncation_raises():
    s = QSeries.from_coefficients([1, 2], 0, 2)
    with pytest.raises(InsufficientTruncation):
        s.coefficient(2)


def test_division_errors():
    z = QSeries.zero(5)
    one = QSeries.one(5)
    with pytest.raises(DivisionByZeroSeries):
        one / z
    with pytest.raises(NonInvertible):
        z.inverse()
    with pytest.raises(DivisionByZeroSeries):
        one / 0


@given(series(), series(), series())
def test_ring_axioms(a, b, c):
    assert (a * b).agrees_with(b * a)
    assert ((a * b) * c).agrees_with(a * (b * c))
    assert (a * (b + c)).agrees_with(a * b + a * c)
    assert (a - a).is_zero


@given(series())
def test_inverse_property(a):
    if a.is_zero:
        return
    prod = a * a.inverse()
    one = QSeries.one(prod.truncation)
    assert prod.agrees_with(one)


@given(series(), st.integers(0, 4))
def test_power_matches_repeated_product(a, m):
    if m == 0:
        assert (a**0).agrees_with(QSeries.one(10))
        return
    expected = a
    for _ in range(m - 1):
        expected = expected * a
    assert (a**m).agrees_with(expected)
    assert (a**m).truncation == expected.truncation


@given(series(integral=False))
def test_json_round_trip(a):
    assert QSeries.from_json(a.to_json()) == a


@given(series(), st.integers(1, 4))
def test_subst_then_ramify_is_identity(a, m):
    assert a.subst(m).ramify(m) == a


@given(series(), st.integers(2, 4))
def test_multisections_sum_back(a, m):
    total = a.multisection(m, 0)
    for r in range(1, m):
        total = total + a.multisection(m, r)
    assert total == a


def test_ramification_collapse_and_lcm():
    a = QSeries.from_terms({Fraction(1, 2): 1}, 4)
    b = QSeries.from_terms({Fraction(1, 3): 1}, 4)
    assert (a + b).ramification == 6
    assert (a * a).ramification == 1
