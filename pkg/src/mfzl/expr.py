"""Symbolic form expressions and the prefix language used on the command line.

Grammar (whitespace is ignored)::

    expr     := NAME | NAME "(" args ")"
    args     := arg ("," arg)*
    arg      := expr | RATIONAL
    RATIONAL := ["-"] DIGITS ["/" DIGITS]

Generators::

    Ek(k)            Eisenstein series E_k(z), k even >= 4
    EkScaled(k, p)   E_k(p z)
    Ekp(k, p)        Fricke Eisenstein series (p^(k/2) E_k(pz) + E_k(z)) / (p^(k/2) + 1)
    Delta            the discriminant form
    DeltaScaled(p)   Delta(p z)
    J                the j-function

Combinators::

    mul(e1, e2, ...)   add(e1, e2, ...)   sub(e1, e2)   neg(e)
    pow(e, n)          scale(c, e)        const(c)

Example: ``mul(pow(Delta,1), sub(J, const(1728)))``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import ParseError

__all__ = [
    "FormExpr", "Gen", "Const", "Product", "Power", "Scalar", "Sum",
    "Ek", "EkScaled", "Ekp", "Delta", "DeltaScaled", "J", "const",
    "parse_form", "integrality_probe_form",
]


def _merge_level(a: int, b: int) -> int:
    if a == 1:
        return b
    if b == 1 or a == b:
        return a
    raise ValueError(f"cannot combine forms of level {a} and level {b}")


class FormExpr:
    """Base class; subclasses are frozen dataclasses forming a tree."""

    weight: int
    level: int

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Scalar(Fraction(other), self)
        return Product((self, other))

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Scalar(Fraction(other), self)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Const(Fraction(other))
        return Sum((self, other))

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Const(Fraction(other))
        return Sum((self, Scalar(Fraction(-1), other)))

    def __neg__(self):
        return Scalar(Fraction(-1), self)

    def __pow__(self, n: int):
        return Power(self, n)

    def generators(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Gen(FormExpr):
    kind: str
    k: int = 0
    p: int = 1

    def __post_init__(self):
        if self.kind not in ("Ek", "EkScaled", "Delta", "DeltaScaled", "J"):
            raise ValueError(f"unknown generator {self.kind}")
        if self.kind in ("Ek", "EkScaled") and (self.k < 4 or self.k % 2):
            raise ValueError("Eisenstein weight must be even and >= 4")
        if self.kind in ("EkScaled", "DeltaScaled") and self.p < 2:
            raise ValueError("scaled generators need p >= 2")

    @property
    def weight(self):
        return {"Ek": self.k, "EkScaled": self.k, "Delta": 12, "DeltaScaled": 12, "J": 0}[self.kind]

    @property
    def level(self):
        return self.p if self.kind in ("EkScaled", "DeltaScaled") else 1

    def generators(self):
        yield self

    def __str__(self):
        if self.kind == "Ek":
            return f"Ek({self.k})"
        if self.kind == "EkScaled":
            return f"EkScaled({self.k},{self.p})"
        if self.kind == "DeltaScaled":
            return f"DeltaScaled({self.p})"
        return self.kind


@dataclass(frozen=True)
class Const(FormExpr):
    value: Fraction

    weight = 0
    level = 1

    def generators(self):
        return iter(())

    def __str__(self):
        return f"const({self.value})"


@dataclass(frozen=True)
class Product(FormExpr):
    factors: tuple

    def __post_init__(self):
        lvl = 1
        for f in self.factors:
            lvl = _merge_level(lvl, f.level)

    @cached_property
    def weight(self):
        return sum(f.weight for f in self.factors)

    @cached_property
    def level(self):
        lvl = 1
        for f in self.factors:
            lvl = _merge_level(lvl, f.level)
        return lvl

    def generators(self):
        for f in self.factors:
            yield from f.generators()

    def __str__(self):
        return "mul(" + ", ".join(str(f) for f in self.factors) + ")"


def _invertible(e: FormExpr) -> bool:
    # nonvanishing on the upper half plane with a nonzero leading coefficient
    if isinstance(e, Gen):
        return e.kind in ("Delta", "DeltaScaled")
    if isinstance(e, Const):
        return e.value != 0
    if isinstance(e, Product):
        return all(_invertible(f) for f in e.factors)
    if isinstance(e, Power):
        return _invertible(e.base)
    if isinstance(e, Scalar):
        return e.c != 0 and _invertible(e.expr)
    return False


@dataclass(frozen=True)
class Power(FormExpr):
    base: FormExpr
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int):
            raise ValueError("powers must be integers")
        if self.n < 0 and not _invertible(self.base):
            raise ValueError(f"negative power of {self.base} is not a weakly holomorphic form")

    @property
    def weight(self):
        return self.base.weight * self.n

    @property
    def level(self):
        return self.base.level

    def generators(self):
        return self.base.generators()

    def __str__(self):
        return f"pow({self.base}, {self.n})"


@dataclass(frozen=True)
class Scalar(FormExpr):
    c: Fraction
    expr: FormExpr

    @property
    def weight(self):
        return self.expr.weight

    @property
    def level(self):
        return self.expr.level

    def generators(self):
        return self.expr.generators()

    def __str__(self):
        return f"scale({self.c}, {self.expr})"


@dataclass(frozen=True)
class Sum(FormExpr):
    terms: tuple

    def __post_init__(self):
        weights = {t.weight for t in self.terms}
        if len(weights) != 1:
            raise ValueError(f"sum of forms with different weights {sorted(weights)}")
        lvl = 1
        for t in self.terms:
            lvl = _merge_level(lvl, t.level)

    @property
    def weight(self):
        return self.terms[0].weight

    @cached_property
    def level(self):
        lvl = 1
        for t in self.terms:
            lvl = _merge_level(lvl, t.level)
        return lvl

    def generators(self):
        for t in self.terms:
            yield from t.generators()

    def __str__(self):
        return "add(" + ", ".join(str(t) for t in self.terms) + ")"


def Ek(k: int) -> Gen:
    return Gen("Ek", k)


def EkScaled(k: int, p: int) -> Gen:
    return Gen("EkScaled", k, p)


def Ekp(k: int, p: int) -> FormExpr:
    """The Fricke Eisenstein series E_{k,p} as an expression tree."""
    if k % 2:
        raise ValueError("E_{k,p} needs even k")
    w = p ** (k // 2)
    return Scalar(Fraction(1, w + 1), Sum((Scalar(Fraction(w), EkScaled(k, p)), Ek(k))))


Delta = Gen("Delta")
J = Gen("J")


def DeltaScaled(p: int) -> Gen:
    return Gen("DeltaScaled", 0, p)


def const(c) -> Const:
    return Const(Fraction(c))


def integrality_probe_form(k: int, j_values, c=1) -> FormExpr:
    """c * Delta^(k/12) * prod (J - j_i), the family used to probe integrality."""
    if k % 12:
        raise ValueError("Delta^(k/12) is only single valued for 12 | k")
    e: FormExpr = Power(Delta, k // 12)
    factors = [e] + [Sum((J, Const(-Fraction(v)))) for v in j_values]
    out = Product(tuple(factors)) if len(factors) > 1 else e
    c = Fraction(c)
    return out if c == 1 else Scalar(c, out)


# -- parser -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>-?\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[(),]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None, value=None):
        tok = self.tokens[self.i]
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            raise ParseError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def parse(self):
        node = self.arg()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"trailing input {tok[1]!r}", tok[2])
        return node

    def arg(self):
        tok = self.peek()
        if tok[0] == "num":
            self.take()
            return Fraction(tok[1])
        return self.expr()

    def expr(self):
        kind, name, pos = self.take("name")
        args = []
        if self.peek()[1] == "(":
            self.take("punct", "(")
            if self.peek()[1] != ")":
                args.append(self.arg())
                while self.peek()[1] == ",":
                    self.take()
                    args.append(self.arg())
            self.take("punct", ")")
        try:
            return _build(name, args)
        except ParseError:
            raise
        except (ValueError, TypeError) as exc:
            raise ParseError(str(exc), pos) from None


def _int_arg(x) -> int:
    if not isinstance(x, Fraction) or x.denominator != 1:
        raise ValueError(f"expected an integer, got {x}")
    return int(x)


def _form_arg(x) -> FormExpr:
    if isinstance(x, Fraction):
        return Const(x)
    return x


def _arity(name, args, n):
    if len(args) != n:
        raise ValueError(f"{name} takes {n} argument(s), got {len(args)}")


def _build(name: str, args: list):
    if name in ("Delta", "J") :
        _arity(name, args, 0)
        return Delta if name == "Delta" else J
    if name == "Ek":
        _arity(name, args, 1)
        return Ek(_int_arg(args[0]))
    if name == "EkScaled":
        _arity(name, args, 2)
        return EkScaled(_int_arg(args[0]), _int_arg(args[1]))
    if name == "Ekp":
        _arity(name, args, 2)
        return Ekp(_int_arg(args[0]), _int_arg(args[1]))
    if name == "DeltaScaled":
        _arity(name, args, 1)
        return DeltaScaled(_int_arg(args[0]))
    if name == "const":
        _arity(name, args, 1)
        if not isinstance(args[0], Fraction):
            raise ValueError("const takes a rational literal")
        return Const(args[0])
    if name == "mul":
        if not args:
            raise ValueError("mul needs at least one argument")
        fs = tuple(_form_arg(a) for a in args)
        return fs[0] if len(fs) == 1 else Product(fs)
    if name == "add":
        if not args:
            raise ValueError("add needs at least one argument")
        ts = tuple(_form_arg(a) for a in args)
        return ts[0] if len(ts) == 1 else Sum(ts)
    if name == "sub":
        _arity(name, args, 2)
        return Sum((_form_arg(args[0]), Scalar(Fraction(-1), _form_arg(args[1]))))
    if name == "neg":
        _arity(name, args, 1)
        return Scalar(Fraction(-1), _form_arg(args[0]))
    if name == "pow":
        _arity(name, args, 2)
        return Power(_form_arg(args[0]), _int_arg(args[1]))
    if name == "scale":
        _arity(name, args, 2)
        if not isinstance(args[0], Fraction):
            raise ValueError("scale takes a rational literal first")
        return Scalar(args[0], _form_arg(args[1]))
    raise ValueError(f"unknown function {name!r}")


def parse_form(text: str) -> FormExpr:
    """Parse the prefix expression language into a :class:`FormExpr`."""
    node = _Parser(text).parse()
    if isinstance(node, Fraction):
        return Const(node)
    return node
