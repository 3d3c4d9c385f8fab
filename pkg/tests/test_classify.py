import random

import mpmath
import pytest

from mfzl.classify import (
    class_polynomial, classify_zero, integrality_certificate, recognize_j_integer, recognize_quadratic,
)
from mfzl.cm import (
    QuadraticForm, enumerate_arc_A, enumerate_fricke_arc, enumerate_line_L, enumerate_line_R,
)
from mfzl.expr import parse_form
from mfzl.forms import expand
from mfzl.numeric import EvalContext, j_value

CTX = EvalContext(prec=256)


def test_recognize_quadratic_examples():
    with CTX.work():
        assert recognize_quadratic(mpmath.mpc(0, 1), CTX) == QuadraticForm(1, 0, 1)
        rho = mpmath.expjpi(mpmath.mpf(2) / 3)
        assert recognize_quadratic(rho, CTX) == QuadraticForm(1, 1, 1)
        z = mpmath.mpc(-0.25, mpmath.sqrt(7) / 4)
        assert recognize_quadratic(z, CTX) == QuadraticForm(2, 1, 1)
        assert recognize_quadratic(mpmath.mpc(mpmath.pi / 10, mpmath.e), CTX) is None


def test_recognize_j_integer_examples():
    with CTX.work():
        assert recognize_j_integer(mpmath.mpc(0, 1), CTX).poly == [-1728, 1]
        assert recognize_j_integer(mpmath.expjpi(mpmath.mpf(2) / 3), CTX).poly == [0, 1]
        assert recognize_j_integer(mpmath.mpc(0, mpmath.sqrt(2)), CTX).poly == [-8000, 1]
        # class number two: j(i sqrt5) is a root of the class polynomial of -20
        rec = recognize_j_integer(mpmath.mpc(0, mpmath.sqrt(5)), CTX)
        assert rec.kind == "minpoly" and tuple(rec.poly) == class_polynomial(-20)


def test_class_polynomials():
    assert class_polynomial(-3) == (0, 1)
    assert class_polynomial(-4) == (-1728, 1)
    assert class_polynomial(-15) == (-121287375, 191025, 1)
    assert class_polynomial(-20) == (-681472000, -1264000, 1)
    assert len(class_polynomial(-23)) == 4


@pytest.mark.parametrize("z, D", [((0, 1), -4), ((-0.5, "sqrt(3)/2"), -3),
                                  ((0, "sqrt(2)"), -8), ((-0.5, "sqrt(7)/2"), -7)])
def test_classify_known_cm(z, D):
    with CTX.work():
        w = mpmath.mpc(mpmath.mpf(z[0]), eval_im(z[1]))
    v = classify_zero(w, CTX)
    assert v.kind == "CM" and v.D == D and str(v) == f"CM({D})"


def eval_im(x):
    if isinstance(x, str):
        return eval(x, {"sqrt": mpmath.sqrt})
    return mpmath.mpf(x)


def test_all_enumerated_points_are_cm():
    pts = enumerate_arc_A() + enumerate_fricke_arc(2) + enumerate_fricke_arc(3) \
        + enumerate_line_L() + enumerate_line_R()
    for pt in pts:
        with CTX.work():
            z = pt.point.to_mpc()
        v = classify_zero(z, CTX)
        if pt.form.disc == -960:
            # class number 8 sits exactly at the degree bound
            assert v.kind == "CM" and v.D == -960
        else:
            assert v.kind == "CM" and v.D == pt.D, (pt, v)


def test_large_class_number_is_unresolved():
    with CTX.work():
        # exactly 1/10 + i/2, a root of 20 z^2 - 4 z + 13 with class number 10
        z = mpmath.mpf(1) / 10 + mpmath.mpc(0, 1) / 2
    v = classify_zero(z, CTX)
    assert v.kind == "Unresolved" and v.D == -2500


def test_float_point_is_candidate():
    v = classify_zero(mpmath.mpc(0.1, 0.5), CTX)
    assert str(v) == "TranscendentalCandidate"


def test_random_points_are_candidates():
    rng = random.Random(12345)
    with CTX.work():
        pts = [mpmath.mpc(mpmath.mpf(rng.random()) - 0.5, 1 + mpmath.mpf(rng.random()))
               for _ in range(100)]
    for z in pts:
        assert classify_zero(z, CTX).kind == "TranscendentalCandidate"


def test_random_point_has_no_small_quadratic_form():
    # brute force over small forms as an independent check of non-recognition
    with CTX.work():
        z = mpmath.mpc(mpmath.mpf(1) / 7 + mpmath.pi / 1000, mpmath.e / 2)
        best = min(abs(a * z * z + b * z + c)
                   for a in range(1, 40) for b in range(-40, 41) for c in range(1, 40))
        assert best > 1e-4
    assert classify_zero(z, CTX).kind == "TranscendentalCandidate"


def test_nonintegral_j_reason():
    # j(z) = 1/2 at some z: algebraic but not an algebraic integer
    with CTX.work():
        z = find_j_preimage(mpmath.mpf(1) / 2)
    v = classify_zero(z, CTX)
    assert v.kind == "TranscendentalCandidate"
    assert v.reason == "j(z) is algebraic but not an algebraic integer"


def find_j_preimage(target):
    # j is real on the arc |z| = 1 and ranges over [0, 1728] there
    t = mpmath.findroot(lambda t: j_value(mpmath.expj(t), CTX).real - target,
                        (mpmath.pi / 2 + 0.01, 2 * mpmath.pi / 3 - 0.01), solver="anderson")
    return mpmath.expj(t)


def test_verdict_json():
    v = classify_zero(mpmath.mpc(0, 1), CTX)
    obj = v.to_json_obj()
    assert obj["kind"] == "CM" and obj["D"] == -4 and obj["form"] == [1, 0, 1]


def test_integrality_certificates():
    f = expand(parse_form("mul(Delta, sub(J, const(1/2)))"), 20)
    c = integrality_certificate(f, 12)
    assert c["verdict"] == "transcendental zero guaranteed"
    assert c["leading"] == "1" and c["offending"]
    g = expand(parse_form("scale(1/2, mul(Delta, sub(J, const(1728))))"), 20)
    assert integrality_certificate(g, 12)["verdict"] == "hypotheses not met"
    assert integrality_certificate(expand(parse_form("Ek(4)"), 20), 4)["verdict"] == "all-integral"
