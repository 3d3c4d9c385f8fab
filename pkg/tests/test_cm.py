from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mfzl.cm import (
    CMPoint, QuadraticForm, SurdPoint, class_number, enumerate_arc_A, enumerate_fricke_arc,
    enumerate_line_L, enumerate_line_R, exception_set, galois_rep, reduce_form, reduce_to_fundamental_domain,
    reduced_forms,
)
from mfzl.errors import BadDiscriminant

from oracles import brute_line


def forms(pts):
    return [(p.form.a, p.form.b, p.form.c) for p in pts]


def test_arc_A_points():
    assert sorted(forms(enumerate_arc_A())) == [(1, 0, 1), (1, 1, 1)]


def test_fricke_two():
    pts = enumerate_fricke_arc(2)
    assert sorted(p.surd for p in pts) == sorted(["(0+i*sqrt(8))/4", "(-1+i*sqrt(7))/4", "(-2+i*sqrt(4))/4"])
    got = {(p.point.re, p.point.im_sq) for p in pts}
    # i/sqrt2, (-1 + i sqrt7)/4, (-1 + i)/2
    assert got == {(Fraction(0), Fraction(1, 2)), (Fraction(-1, 4), Fraction(7, 16)),
                   (Fraction(-1, 2), Fraction(1, 4))}


def test_fricke_three():
    got = {(p.point.re, p.point.im_sq) for p in enumerate_fricke_arc(3)}
    # i/sqrt3, (-3 + i sqrt3)/6, (-1 + i sqrt11)/6, (-1 + i sqrt2)/3
    assert got == {(Fraction(0), Fraction(1, 3)), (Fraction(-1, 2), Fraction(1, 12)),
                   (Fraction(-1, 6), Fraction(11, 36)), (Fraction(-1, 3), Fraction(2, 9))}


@pytest.mark.parametrize("p", [2, 3])
def test_fricke_points_on_arc(p):
    for pt in enumerate_fricke_arc(p, c_max=6):
        assert pt.point.abs_sq() == Fraction(1, p)
        assert -Fraction(1, 2) <= pt.point.re <= 0


def test_fricke_rejects_other_levels():
    with pytest.raises(ValueError):
        enumerate_fricke_arc(5)


# -- lines: brute force over forms -------------------------------------------------

def test_line_L_matches_brute_force():
    pts = enumerate_line_L(20, 2)
    assert len(pts) == 5
    assert {(p.point.re, p.point.im_sq) for p in pts} == brute_line(Fraction(-1, 2), 1)


def test_line_R_matches_brute_force():
    pts = enumerate_line_R(20, 2)
    assert len(pts) == 3
    assert {(p.point.re, p.point.im_sq) for p in pts} == brute_line(Fraction(0), 0)
    assert sorted(p.point.im_sq for p in pts) == [1, 2, 3]


def test_line_L_points():
    got = sorted(p.point.im_sq for p in enumerate_line_L(20, 2))
    assert got == [Fraction(3, 4), Fraction(15, 16), Fraction(7, 4), Fraction(11, 4), Fraction(15, 4)]


def test_line_height_grows_list():
    assert len(enumerate_line_R(100, 3)) > 3
    assert all(p.point.im_sq < 9 for p in enumerate_line_R(100, 3))


# -- forms -------------------------------------------------------------------------

@pytest.mark.parametrize("D, form", [(-3, (1, 1, 1)), (-4, (1, 0, 1)), (-7, (1, 1, 2)),
                                     (-8, (1, 0, 2)), (-15, (1, 1, 4)), (-20, (1, 0, 5))])
def test_galois_rep(D, form):
    q = galois_rep(D)
    assert (q.a, q.b, q.c) == form and q.disc == D


@pytest.mark.parametrize("D", [-3, -4, -7, -8, -11, -12, -15, -16, -19, -20, -23])
def test_galois_rep_root_on_a_boundary_locus(D):
    pt = galois_rep(D).root()
    assert pt.re in (0, Fraction(-1, 2))
    assert pt.re == (Fraction(-1, 2) if D % 4 == 1 else 0)


@pytest.mark.parametrize("D", [0, 5, -1, -2, -5])
def test_bad_discriminant(D):
    with pytest.raises(BadDiscriminant):
        galois_rep(D)


@pytest.mark.parametrize("D, h", [(-3, 1), (-4, 1), (-7, 1), (-8, 1), (-11, 1), (-12, 1), (-15, 2),
                                  (-20, 2), (-23, 3), (-39, 4), (-47, 5), (-71, 7), (-163, 1), (-960, 8)])
def test_class_numbers(D, h):
    assert class_number(D) == h


def test_reduced_forms_are_reduced_and_distinct():
    for D in range(-3, -200, -1):
        if D % 4 not in (0, 1):
            continue
        fs = reduced_forms(D)
        assert fs and len(set(fs)) == len(fs)
        assert all(q.is_reduced() and q.is_primitive and q.disc == D for q in fs)


@given(st.integers(1, 40), st.integers(-40, 40), st.integers(1, 40))
def test_reduce_form_keeps_discriminant(a, b, c):
    q = QuadraticForm(a, b, c)
    if q.disc >= 0:
        return
    r = reduce_form(q)
    assert r.disc == q.disc and r.is_reduced()
    # equivalent forms share the reduced point in the fundamental domain
    with mpmath.workprec(200):
        zq, _ = reduce_to_fundamental_domain(q.root().to_mpc())
        assert abs(zq - r.root().to_mpc()) < mpmath.mpf(10) ** -40


def test_root_residual():
    with mpmath.workprec(256):
        for pt in enumerate_line_L() + enumerate_line_R() + enumerate_fricke_arc(2) + enumerate_fricke_arc(3):
            q = pt.form
            z = pt.point.to_mpc()
            assert abs(q.a * z * z + q.b * z + q.c) < mpmath.mpf(10) ** -30


# -- exception sets --------------------------------------------------------------------

def test_exception_set_size_and_values():
    for p in (2, 3, 5):
        assert len(exception_set(p)) == 2 * p
    s = exception_set(2)
    assert (s[0].re, s[0].im_sq) == (0, 1)
    assert (s[1].re, s[1].im_sq) == (Fraction(-1, 2), Fraction(1, 4))
    assert (s[2].re, s[2].im_sq) == (Fraction(1, 2), Fraction(3, 4))


def test_exception_set_points_are_cm():
    for p in (2, 3, 5, 7):
        for pt in exception_set(p):
            assert pt.form().disc in (-3, -4)


# -- fundamental domain ------------------------------------------------------------------

@pytest.mark.parametrize("z, expected, gamma", [
    (mpmath.mpc(5, 1), mpmath.mpc(0, 1), ((1, -5), (0, 1))),
    (mpmath.mpc(0, 0.5), mpmath.mpc(0, 2), ((0, -1), (1, 0))),
])
def test_reduce_examples(z, expected, gamma):
    with mpmath.workprec(128):
        zr, g = reduce_to_fundamental_domain(z)
        assert abs(zr - expected) < 1e-30
        assert g == gamma


def test_reduce_rho_plus_one():
    with mpmath.workprec(128):
        rho = mpmath.expjpi(mpmath.mpf(2) / 3)
        zr, g = reduce_to_fundamental_domain(rho + 1)
        # T^-1 and S both send rho + 1 to rho
        assert abs(zr - rho) < 1e-30 and g in (((1, -1), (0, 1)), ((0, -1), (1, 0)))


@given(st.floats(-50, 50), st.floats(0.001, 20))
def test_reduce_property(x, y):
    with mpmath.workprec(128):
        z = mpmath.mpc(x, y)
        zr, ((a, b), (c, d)) = reduce_to_fundamental_domain(z)
        assert a * d - b * c == 1
        assert abs((a * z + b) / (c * z + d) - zr) < mpmath.mpf(10) ** -25 * max(1, abs(zr))
        assert -0.5 - 1e-30 <= zr.real < 0.5
        assert abs(zr) >= 1 - mpmath.mpf(10) ** -30


def test_reduce_rejects_lower_half_plane():
    with pytest.raises(ValueError):
        reduce_to_fundamental_domain(mpmath.mpc(0, -1))


# -- serialization -------------------------------------------------------------------------

def test_cm_point_json():
    pt = CMPoint(QuadraticForm(1, 1, 2), "L")
    obj = pt.to_json_obj()
    assert obj["D"] == -7 and obj["locus"] == "L"
    assert obj["z"] == ["-1/2", 7, 2]
    assert pt.surd == "(-1+i*sqrt(7))/2"


def test_surd_point_validation():
    with pytest.raises(ValueError):
        SurdPoint(Fraction(0), Fraction(-1))
    assert SurdPoint(0.5, 0.75).re == Fraction(1, 2)
