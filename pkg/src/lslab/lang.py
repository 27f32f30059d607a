"""Mini-language for regions and measures.

Regions::

    all | cap(theta, phi, radius) | tube(theta, phi, halfwidth) | band(theta1, theta2)
    | not(R) | union(R, R) | inter(R, R)

Measures::

    lebesgue | scaled(c, R) | atom(theta, phi, mass) | sum(M, M)

Every numeric argument is a scalar: a product of factors separated by
``*``, each factor a decimal literal, ``const:x``, ``pi``, ``log-lambda``,
``inv-log-lambda``, ``inv-lambda`` or ``pow:a`` (``lambda**a``).  Scalars
are resolved per frequency, e.g. ``scaled(log-lambda, cap(0,0,inv-lambda))``.
Angles are radians; a cap/tube axis is given by its spherical angles.
"""

import math
import re
from dataclasses import dataclass

import numpy as np

from lslab import geom


class ParseError(ValueError):
    def __init__(self, message, pos, text=""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}" + (f": {text[:pos]}^{text[pos:]}" if text else ""))


# -- scalars -------------------------------------------------------------------------------

_NUMBER = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def _factor(tok):
    if tok == "pi":
        return lambda lam: math.pi
    if tok == "log-lambda":
        return lambda lam: math.log(lam)
    if tok == "inv-log-lambda":
        return lambda lam: 1.0 / math.log(lam)
    if tok == "inv-lambda":
        return lambda lam: 1.0 / lam
    if tok.startswith("const:") and _NUMBER.match(tok[6:]):
        v = float(tok[6:])
        return lambda lam: v
    if tok.startswith("pow:") and _NUMBER.match(tok[4:]):
        a = float(tok[4:])
        return lambda lam: lam**a
    if _NUMBER.match(tok):
        v = float(tok)
        return lambda lam: v
    return None


@dataclass(frozen=True)
class Scalar:
    text: str
    factors: tuple

    def __call__(self, lam):
        out = 1.0
        for f in self.factors:
            out *= f(lam)
        return out


# -- tokenizer / parser --------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<punct>[(),])|(?P<atom>[^\s(),]+))")


def _tokenize(text):
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise ParseError("unexpected character", pos, text)
        kind = "punct" if m.group("punct") else "atom"
        val = m.group(kind)
        out.append((val, m.start(kind)))
        pos = m.end()
    out.append(("", len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, expected=None):
        tok, pos = self.toks[self.i]
        if expected is not None and tok != expected:
            shown = tok or "end of input"
            raise ParseError(f"expected {expected!r}, found {shown!r}", pos, self.text)
        self.i += 1
        return tok, pos

    def finish(self):
        tok, pos = self.peek()
        if tok:
            raise ParseError(f"trailing input {tok!r}", pos, self.text)

    def scalar(self):
        tok, pos = self.take()
        factors = []
        for part in tok.split("*"):
            f = _factor(part)
            if f is None:
                raise ParseError(f"bad scalar {tok!r}", pos, self.text)
            factors.append(f)
        return Scalar(tok, tuple(factors))

    def args(self, kinds):
        self.take("(")
        out = []
        for j, kind in enumerate(kinds):
            if j:
                self.take(",")
            out.append(kind())
        self.take(")")
        return out

    def region(self):
        tok, pos = self.take()
        if tok == "all":
            return RegionExpr("all", ())
        if tok in ("cap", "tube"):
            return RegionExpr(tok, tuple(self.args([self.scalar] * 3)))
        if tok == "band":
            return RegionExpr("band", tuple(self.args([self.scalar] * 2)))
        if tok == "not":
            return RegionExpr("not", tuple(self.args([self.region])))
        if tok in ("union", "inter"):
            return RegionExpr(tok, tuple(self.args([self.region] * 2)))
        raise ParseError(f"unknown region {tok!r}", pos, self.text)

    def measure(self):
        tok, pos = self.take()
        if tok == "lebesgue":
            return MeasureExpr("lebesgue", ())
        if tok == "scaled":
            return MeasureExpr("scaled", tuple(self.args([self.scalar, self.region])))
        if tok == "atom":
            return MeasureExpr("atom", tuple(self.args([self.scalar] * 3)))
        if tok == "sum":
            return MeasureExpr("sum", tuple(self.args([self.measure] * 2)))
        raise ParseError(f"unknown measure {tok!r}", pos, self.text)


# -- expression trees ----------------------------------------------------------------------


@dataclass(frozen=True)
class RegionExpr:
    op: str
    args: tuple

    def resolve(self, lam=1.0):
        """Concrete :class:`lslab.geom.Region` at frequency ``lam``."""
        a = self.args
        if self.op == "all":
            return geom.All()
        if self.op == "cap":
            return geom.Cap(geom.point(a[0](lam), a[1](lam)), a[2](lam))
        if self.op == "tube":
            return geom.Tube(geom.point(a[0](lam), a[1](lam)), a[2](lam))
        if self.op == "band":
            return geom.Band(a[0](lam), a[1](lam))
        if self.op == "not":
            return geom.Complement(a[0].resolve(lam))
        if self.op == "union":
            return geom.Union(a[0].resolve(lam), a[1].resolve(lam))
        return geom.Intersection(a[0].resolve(lam), a[1].resolve(lam))


@dataclass(frozen=True)
class MeasureExpr:
    op: str
    args: tuple

    def regions(self, lam=1.0):
        if self.op == "scaled":
            return [self.args[1].resolve(lam)]
        if self.op == "sum":
            return self.args[0].regions(lam) + self.args[1].regions(lam)
        return []

    def axial_breaks(self, lam=1.0):
        """Union of latitude-circle boundaries of all regions, or None."""
        out = set()
        for r in self.regions(lam):
            b = r.axial_breaks()
            if b is None:
                return None
            out |= set(b)
        return tuple(sorted(out))

    def resolve(self, lam, grid):
        """Concrete :class:`lslab.geom.Measure` on ``grid`` at frequency ``lam``."""
        a = self.args
        if self.op == "lebesgue":
            return geom.lebesgue(grid)
        if self.op == "scaled":
            return geom.region_indicator(a[1].resolve(lam), grid).scaled(a[0](lam))
        if self.op == "atom":
            return geom.Measure(grid, np.zeros(grid.size), [(geom.point(a[0](lam), a[1](lam)), a[2](lam))])
        return a[0].resolve(lam, grid) + a[1].resolve(lam, grid)


def parse_region(text):
    p = _Parser(text)
    out = p.region()
    p.finish()
    return out


def parse_measure(text):
    p = _Parser(text)
    out = p.measure()
    p.finish()
    return out
