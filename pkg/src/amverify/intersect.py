"""Small expression language for intersection numbers.

Examples (``amx`` space)::

    (-K)^3          -> -4
    (2H)^3          -> 16
    (-K).e_1        -> 1
    (-K).l_{1,2}    -> 0

``.`` or ``*`` intersects, ``^n`` repeats a factor, an integer prefix scales.
In the ``dp2`` space two surface classes intersect to a number; in ``amx``
three divisors or one divisor and one curve do.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import amcycles, dp2
from .lattice import (
    BilinearLattice,
    ClassVector,
    LatticeError,
    amx_anticanonical,
    amx_divisors,
    amx_pairing,
    amx_triple_table,
    anticanonical,
    pair,
    pair_div_curve,
    triple,
)


class ExpressionError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*(?:\{\d+,\d+\})?)|(.))")


def _tokens(text: str) -> list[tuple[str, str]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        pos = m.end()
        if m[1]:
            out.append(("int", m[1]))
        elif m[2]:
            out.append(("name", m[2]))
        elif m[3].strip():
            if m[3] not in "+-*.^()":
                raise ExpressionError(f"unexpected character {m[3]!r}")
            out.append(("op", m[3]))
    return out


@dataclass(frozen=True)
class Cls:
    vec: ClassVector
    kind: str  # "surface", "divisor" or "curve"


@dataclass(frozen=True)
class Prod:
    factors: tuple[Cls, ...]


class Space:
    name = ""

    def symbol(self, name: str) -> Cls:
        raise NotImplementedError

    def reduce(self, factors: tuple[Cls, ...]):
        raise NotImplementedError


class SurfaceSpace(Space):
    """A surface lattice: basis names, ``K`` for blow-ups of the plane, and line names on dP2."""

    def __init__(self, lattice: BilinearLattice, name: str = "dp2"):
        self.lattice = lattice
        self.name = name

    def symbol(self, name: str) -> Cls:
        lat = self.lattice
        if name in lat.basis_names:
            return Cls(lat.basis_vector(name), "surface")
        if name == "K" and lat.basis_names[0] == "l":
            return Cls(-anticanonical(lat), "surface")
        if lat.name == "dp2-picard":
            m = re.fullmatch(r"([ABCD])(\d+)", name)
            if m:
                try:
                    return Cls(dp2.line(m[1], *(int(c) for c in m[2])).cls, "surface")
                except dp2.NotALineError:
                    pass
        raise ExpressionError(f"unknown symbol {name!r} in space {self.name}")

    def reduce(self, factors):
        if len(factors) == 2:
            return pair(self.lattice, factors[0].vec, factors[1].vec)
        if len(factors) > 2:
            raise ExpressionError("a surface intersection takes exactly two classes")
        return Prod(factors)


class ThreefoldSpace(Space):
    """Divisors H, E_i, K and curves l, e_i, l_i, l_{i,j} on the blown-up double solid."""

    name = "amx"

    def symbol(self, name: str) -> Cls:
        div = amx_divisors()
        if name == "K":
            return Cls(-amx_anticanonical(), "divisor")
        m = re.fullmatch(r"E_?(\d+)", name)
        if name == "H" or m:
            try:
                return Cls(div.basis_vector("H" if name == "H" else f"E{int(m[1])}"), "divisor")
            except LatticeError:
                raise ExpressionError(f"unknown divisor {name!r}") from None
        try:
            return Cls(amcycles.named_class(name), "curve")
        except ValueError:
            raise ExpressionError(f"unknown symbol {name!r} in space amx") from None

    def reduce(self, factors):
        divs = [f.vec for f in factors if f.kind == "divisor"]
        curves = [f.vec for f in factors if f.kind == "curve"]
        if len(divs) == 3 and not curves:
            return triple(amx_triple_table(), *divs)
        if len(divs) == 1 and len(curves) == 1:
            return pair_div_curve(amx_pairing(), divs[0], curves[0])
        if len(curves) > 1 or (curves and len(divs) > 1) or len(factors) > 3:
            raise ExpressionError(f"cannot intersect {len(divs)} divisor(s) with {len(curves)} curve(s)")
        return Prod(tuple(factors))


def _mul(space: Space, a, b):
    if isinstance(a, int) and isinstance(b, int):
        return a * b
    if isinstance(b, int):
        a, b = b, a
    if isinstance(a, int):
        if isinstance(b, Cls):
            return Cls(a * b.vec, b.kind)
        return Prod((Cls(a * b.factors[0].vec, b.factors[0].kind),) + b.factors[1:])
    fa = a.factors if isinstance(a, Prod) else (a,)
    fb = b.factors if isinstance(b, Prod) else (b,)
    return space.reduce(fa + fb)


def _add(a, b, sign: int):
    if isinstance(a, int) and isinstance(b, int):
        return a + sign * b
    if isinstance(a, Cls) and isinstance(b, Cls) and a.kind == b.kind:
        return Cls(a.vec + b.vec if sign > 0 else a.vec - b.vec, a.kind)
    raise ExpressionError("can only add two numbers or two classes of the same kind")


def _neg(a):
    if isinstance(a, int):
        return -a
    if isinstance(a, Cls):
        return Cls(-a.vec, a.kind)
    return Prod((Cls(-a.factors[0].vec, a.factors[0].kind),) + a.factors[1:])


class _Parser:
    def __init__(self, text: str, space: Space):
        self.toks = _tokens(text)
        self.pos = 0
        self.space = space

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            raise ExpressionError(f"expected {value or 'more input'} at token {self.pos}")
        self.pos += 1
        return tok

    def parse(self):
        v = self.expr()
        if self.pos != len(self.toks):
            raise ExpressionError(f"trailing input at token {self.pos}: {self.peek()[1]!r}")
        return v

    def expr(self):
        v = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            v = _add(v, self.term(), 1 if op == "+" else -1)
        return v

    def term(self):
        v = self.unary()
        while self.peek() in (("op", "."), ("op", "*")):
            self.take()
            v = _mul(self.space, v, self.unary())
        return v

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return _neg(self.unary())
        return self.power()

    def power(self):
        v = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, n = self.take()
            if kind != "int" or int(n) < 1:
                raise ExpressionError("exponent must be a positive integer")
            acc = v
            for _ in range(int(n) - 1):
                acc = _mul(self.space, acc, v)
            v = acc
        return v

    def atom(self):
        kind, val = self.peek()
        if kind == "int":
            self.take()
            n = int(val)
            nxt = self.peek()
            if nxt[0] == "name" or nxt == ("op", "("):
                return _mul(self.space, n, self.power())
            return n
        if kind == "name":
            self.take()
            return self.space.symbol(val)
        if (kind, val) == ("op", "("):
            self.take()
            v = self.expr()
            self.take(")")
            return v
        raise ExpressionError(f"unexpected token {val!r}")


def get_space(name: str, lattice: BilinearLattice | None = None) -> Space:
    if name == "amx":
        return ThreefoldSpace()
    if name == "dp2":
        return SurfaceSpace(lattice or dp2.picard(), "dp2")
    if name == "lattice":
        if lattice is None:
            raise ExpressionError("space 'lattice' needs a lattice file")
        return SurfaceSpace(lattice, lattice.name)
    raise ExpressionError(f"unknown space {name!r}")


def evaluate(expr: str, space: str | Space = "amx") -> int:
    sp = get_space(space) if isinstance(space, str) else space
    try:
        v = _Parser(expr, sp).parse()
    except LatticeError as exc:
        raise ExpressionError(str(exc)) from exc
    if not isinstance(v, int):
        raise ExpressionError("expression does not evaluate to an intersection number")
    return v
