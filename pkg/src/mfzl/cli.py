"""Command line interface: ``mfzl <command> ...``.

Exit codes: 0 success, 1 golden mismatch, 2 pipeline or usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import re
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

import mpmath

from . import cm
from .classify import classify_zero, integrality_certificate
from .errors import MfzlError
from .expr import parse_form
from .forms import expand
from .jpoly import extract_pf, integrality_report
from .locator import count_zeros_contour, find_zeros, profile_to_csv, transport
from .numeric import default_context

GOLDEN_TARGETS = ("arc-A", "fricke-2", "fricke-3", "line-L", "line-R", "exception-set", "integrality")
DIGITS = 30


# -- output helpers ----------------------------------------------------------------

def _emit(rows: list[dict], fmt: str, out, columns=None):
    columns = columns or (list(rows[0]) if rows else [])
    if fmt == "json":
        json.dump(rows, out, indent=2)
        out.write("\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([r[c] for c in columns])
    else:
        widths = {c: max([len(c)] + [len(str(r[c])) for r in rows]) for c in columns}
        out.write("  ".join(c.ljust(widths[c]) for c in columns).rstrip() + "\n")
        for r in rows:
            out.write("  ".join(str(r[c]).ljust(widths[c]) for c in columns).rstrip() + "\n")


def _num(x, digits=DIGITS):
    return mpmath.nstr(x, digits, min_fixed=-5, max_fixed=5)


def _z(z, digits=DIGITS):
    re_, im_ = _num(z.real, digits), _num(z.imag, digits)
    sign = "-" if im_.startswith("-") else "+"
    return f"{re_}{sign}{im_.lstrip('-')}i"


_SQRT = re.compile(r"^\s*(?:(?P<c>[-+]?[0-9./]+)\*)?sqrt\((?P<r>[^()]+)\)(?:/(?P<d>[0-9]+))?\s*$")


def parse_real(text: str):
    """A rational ("-1/4"), a decimal, or c*sqrt(r)/d with rational c, r and integer d."""
    m = _SQRT.match(text)
    if m:
        v = mpmath.sqrt(_rational(m.group("r")))
        if m.group("c"):
            v *= _rational(m.group("c"))
        if m.group("d"):
            v /= int(m.group("d"))
        return v
    return _rational(text)


def _rational(text: str):
    try:
        q = Fraction(text.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    return mpmath.mpf(q.numerator) / q.denominator


# -- commands ------------------------------------------------------------------------

def cmd_expand(args, out):
    expr = parse_form(args.form)
    s = expand(expr, args.truncation)
    if args.format == "table":
        out.write(f"{expr}  weight {expr.weight}  level {expr.level}\n")
        out.write(repr(s) + "\n")
    elif args.format == "csv":
        _emit([{"exponent": str(e), "coefficient": str(c)} for e, c in s.terms()], "csv", out)
    else:
        json.dump(s.to_json_obj(), out)
        out.write("\n")
    return 0


def cmd_jpoly(args, out):
    expr = parse_form(args.form)
    k = args.weight if args.weight is not None else expr.weight
    if expr.level != 1:
        raise MfzlError("P_f is only defined for level-one forms")
    n = args.truncation
    f = expand(expr, n)
    if f.is_zero:
        raise MfzlError("the form expands to zero")
    need = k - 11 * int(f.valuation) + 1
    if need > n:
        f = expand(expr, need)
    P = extract_pf(f, k)
    rep = integrality_report(P)
    obj = {"P": P.to_json_obj(), "degree": P.degree, "integrality": rep.to_json_obj()}
    if args.format == "json":
        json.dump(obj, out, indent=2)
        out.write("\n")
    elif args.format == "csv":
        _emit([{"power": i, "coefficient": str(c)} for i, c in enumerate(P.coeffs)], "csv", out)
    else:
        out.write(f"P_f(X) = {P}\n")
        out.write(f"verdict: {rep.verdict}\n")
        if rep.offending_indices:
            out.write("non-integral coefficients at X^" + ", X^".join(map(str, rep.offending_indices)) + "\n")
    return 0


def cmd_zeros(args, out):
    ctx = default_context(args.precision)
    expr = parse_form(args.form)
    locus = args.locus
    if locus == "Ap":
        locus = f"A{args.p}"
    recs = find_zeros(expr, locus, height=args.height, samples=args.samples, ctx=ctx)
    rows = []
    for r in recs:
        row = {
            "param": _num(r.param),
            "z": _z(r.z),
            "residual": mpmath.nstr(r.residual, 3),
            "mult": r.multiplicity,
        }
        if not args.no_classify:
            row["verdict"] = str(classify_zero(r, ctx))
        rows.append(row)
    _emit(rows, args.format, out, list(rows[0]) if rows else ["param", "z", "residual", "mult", "verdict"])
    if args.count:
        if locus not in ("A", "A2", "A3"):
            raise MfzlError("--count is available on the arcs only")
        rsq = {"A": Fraction(1), "A2": Fraction(1, 2), "A3": Fraction(1, 3)}[locus]
        c = count_zeros_contour(expr, radius_sq=rsq, Y=args.count_height)
        arc = sum(r.multiplicity for r in recs)
        out.write(f"contour count {c.count} (residual {c.residual:.2e}), arc count {arc}\n")
    return 0


def cmd_profile(args, out):
    ctx = default_context(args.precision)
    locus = f"A{args.p}" if args.locus == "Ap" else args.locus
    out.write(profile_to_csv(parse_form(args.form), locus, args.samples, ctx, height=args.height,
                             digits=args.digits))
    return 0


def _cm_points(locus: str, p: int, height, dbound: int):
    if locus == "A":
        return cm.enumerate_arc_A()
    if locus in ("Ap", "A2", "A3"):
        return cm.enumerate_fricke_arc(p if locus == "Ap" else int(locus[1]))
    if locus == "L":
        return cm.enumerate_line_L(dbound, height)
    return cm.enumerate_line_R(dbound, height)


def _point_row(pt: cm.CMPoint) -> dict:
    f = pt.form
    return {"surd": pt.surd, "D": pt.D, "form": f"({f.a},{f.b},{f.c})", "locus": pt.locus}


def cmd_cm(args, out):
    pts = _cm_points(args.locus, args.p, Fraction(args.height), args.dbound)
    if args.format == "json":
        json.dump([dict(p.to_json_obj(), surd=p.surd) for p in pts], out, indent=2)
        out.write("\n")
    else:
        _emit([_point_row(p) for p in pts], args.format, out, ["surd", "D", "form", "locus"])
    return 0


def cmd_classify(args, out):
    ctx = default_context(args.precision)
    with ctx.work():
        z = mpmath.mpc(parse_real(args.re), parse_real(args.im))
    v = classify_zero(z, ctx)
    if args.format == "json":
        json.dump(v.to_json_obj(), out, indent=2)
        out.write("\n")
    else:
        row = {"z": _z(z), "verdict": str(v), "form": str(v.form or ""), "j": _z(v.j, 20)}
        _emit([row], args.format, out)
    return 0


def cmd_transport(args, out):
    ctx = default_context(args.precision)
    with ctx.work():
        z = mpmath.mpc(parse_real(args.re), parse_real(args.im))
        w = transport(z, args.which, inverse=args.inverse)
        _emit([{"z": _z(z), "image": _z(w)}], args.format, out)
    return 0


# -- golden suite --------------------------------------------------------------------

def _points_obj(points) -> list:
    return sorted(({"form": [p.form.a, p.form.b, p.form.c], "D": p.D, "surd": p.surd} for p in points),
                  key=lambda d: d["surd"])


def _surd_obj(points) -> list:
    out = []
    for s in points:
        f = s.form()
        out.append({"form": [f.a, f.b, f.c], "D": f.disc, "surd": str(s)})
    return out


def compute_target(name: str, golden: dict):
    """Recompute a golden target from the library; returns a comparable object."""
    if name == "arc-A":
        return _points_obj(cm.enumerate_arc_A())
    if name in ("fricke-2", "fricke-3"):
        return _points_obj(cm.enumerate_fricke_arc(int(name[-1])))
    if name in ("line-L", "line-R"):
        h, d = Fraction(golden.get("height", 2)), int(golden.get("dbound", 20))
        pts = cm.enumerate_line_L(d, h) if name == "line-L" else cm.enumerate_line_R(d, h)
        return _points_obj(pts)
    if name == "exception-set":
        return {p: _surd_obj(cm.exception_set(int(p))) for p in sorted(golden["sets"])}
    if name == "integrality":
        out = []
        for case in golden["cases"]:
            expr = parse_form(case["form"])
            k = case["weight"]
            f = expand(expr, k + 2)
            out.append({"form": case["form"], "weight": k, "verdict": integrality_certificate(f, k)["verdict"]})
        return out
    raise KeyError(name)


def expected_target(name: str, golden: dict):
    if name in ("arc-A", "fricke-2", "fricke-3", "line-L", "line-R"):
        return sorted(golden["points"], key=lambda d: d["surd"])
    if name == "exception-set":
        return {p: golden["sets"][p] for p in sorted(golden["sets"])}
    return golden["cases"]


def _golden_dir(path: str | None) -> Path:
    if path:
        return Path(path)
    return Path(str(resources.files("mfzl") / "golden"))


def verify_golden(only=None, golden_dir=None, out=sys.stdout) -> int:
    gdir = _golden_dir(golden_dir)
    targets = [only] if only else list(GOLDEN_TARGETS)
    failed = []
    for name in targets:
        if name not in GOLDEN_TARGETS:
            raise MfzlError(f"unknown target {name!r}; choose from {', '.join(GOLDEN_TARGETS)}")
        path = gdir / f"{name}.json"
        try:
            golden = json.loads(path.read_text(encoding="utf-8"))
            ok = compute_target(name, golden) == expected_target(name, golden)
        except (OSError, KeyError, ValueError, TypeError) as exc:
            ok = False
            out.write(f"FAIL {name}: unreadable golden file ({exc})\n")
            failed.append(name)
            continue
        out.write(f"{'PASS' if ok else 'FAIL'} {name}\n")
        if not ok:
            failed.append(name)
    out.write(f"{len(targets) - len(failed)}/{len(targets)} targets pass\n")
    return 1 if failed else 0


def cmd_verify(args, out):
    return verify_golden(args.only, args.golden_dir, out)


# -- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=None,
                        help="working precision in bits (default: $MFZL_PRECISION or 256)")
    common.add_argument("--format", choices=("table", "json", "csv"), default="table")

    p = argparse.ArgumentParser(prog="mfzl", description="Zeros of weakly holomorphic modular forms.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("expand", parents=[common], help="exact q-expansion of a form expression")
    e.add_argument("form")
    e.add_argument("-N", "--truncation", type=int, default=10)
    e.set_defaults(func=cmd_expand)

    j = sub.add_parser("jpoly", parents=[common], help="the polynomial P_f with f^12/Delta^k = P_f(j)")
    j.add_argument("form")
    j.add_argument("--weight", type=int, default=None)
    j.add_argument("-N", "--truncation", type=int, default=16)
    j.set_defaults(func=cmd_jpoly)

    z = sub.add_parser("zeros", parents=[common], help="locate and classify zeros on a locus")
    z.add_argument("--form", required=True)
    z.add_argument("--locus", choices=("A", "Ap", "A2", "A3", "L", "R"), default="A")
    z.add_argument("--p", type=int, default=2)
    z.add_argument("--height", type=float, default=2.0)
    z.add_argument("--samples", type=int, default=None)
    z.add_argument("--weight", type=int, default=None, help="ignored for expressions (weight is inferred)")
    z.add_argument("--no-classify", action="store_true")
    z.add_argument("--count", action="store_true", help="also count zeros by the argument principle")
    z.add_argument("--count-height", type=float, default=10.0)
    z.set_defaults(func=cmd_zeros)

    pr = sub.add_parser("profile", parents=[common], help="sample the real profile of a form as CSV")
    pr.add_argument("--form", required=True)
    pr.add_argument("--locus", choices=("A", "Ap", "A2", "A3", "L", "R"), default="A")
    pr.add_argument("--p", type=int, default=2)
    pr.add_argument("--height", type=float, default=2.0)
    pr.add_argument("--samples", type=int, default=64)
    pr.add_argument("--digits", type=int, default=None)
    pr.set_defaults(func=cmd_profile)

    c = sub.add_parser("cm", parents=[common], help="CM candidate points on a locus")
    c.add_argument("--locus", choices=("A", "Ap", "A2", "A3", "L", "R"), default="A")
    c.add_argument("--p", type=int, default=2)
    c.add_argument("--height", default="2")
    c.add_argument("--dbound", type=int, default=20)
    c.set_defaults(func=cmd_cm)

    k = sub.add_parser("classify", parents=[common], help="CM or transcendental-candidate verdict for a point")
    k.add_argument("re", help="real part: rational, decimal or sqrt(r)")
    k.add_argument("im", help="imaginary part: rational, decimal or sqrt(r)")
    k.set_defaults(func=cmd_classify)

    t = sub.add_parser("transport", parents=[common], help="apply gamma_L or gamma_R to a point")
    t.add_argument("re")
    t.add_argument("im")
    t.add_argument("--which", choices=("L", "R"), default="R")
    t.add_argument("--inverse", action="store_true")
    t.set_defaults(func=cmd_transport)

    v = sub.add_parser("verify-golden", parents=[common], help="check the stored lists against the library")
    v.add_argument("--only", choices=GOLDEN_TARGETS, default=None)
    v.add_argument("--golden-dir", default=None)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.func(args, out)
    except (MfzlError, ValueError, ArithmeticError, argparse.ArgumentTypeError) as exc:
        sys.stderr.write(f"mfzl: error: {exc}\n")
        return 2


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
