"""Exact integer lattices: bilinear pairings, divisor/curve pairings and a
trilinear rule table for the blown-up double solid.

Every accumulated value is range-checked against signed 64-bit bounds; an
out-of-range intermediate raises :class:`LatticeOverflowError` instead of
wrapping.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping, Sequence

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


class LatticeError(ValueError):
    """Malformed lattice data or mixing vectors from different lattices."""


class LatticeOverflowError(LatticeError, ArithmeticError):
    pass


def _checked(value: int) -> int:
    if value < INT64_MIN or value > INT64_MAX:
        raise LatticeOverflowError(f"integer overflow: {value} does not fit in int64")
    return value


def _dot(us: Sequence[int], vs: Sequence[int]) -> int:
    acc = 0
    for a, b in zip(us, vs):
        p = a * b
        acc += p
        if not (INT64_MIN <= p <= INT64_MAX and INT64_MIN <= acc <= INT64_MAX):
            _checked(p)
            _checked(acc)
    return acc


@dataclass(frozen=True)
class BilinearLattice:
    name: str
    basis_names: tuple[str, ...]
    gram: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "basis_names", tuple(self.basis_names))
        object.__setattr__(self, "gram", tuple(tuple(int(x) for x in row) for row in self.gram))
        n = len(self.basis_names)
        if n == 0:
            raise LatticeError("lattice rank must be positive")
        if len(set(self.basis_names)) != n:
            raise LatticeError(f"{self.name}: duplicate basis names")
        if len(self.gram) != n or any(len(row) != n for row in self.gram):
            raise LatticeError(f"{self.name}: gram must be {n}x{n}")
        for i in range(n):
            for j in range(n):
                _checked(self.gram[i][j])
                if self.gram[i][j] != self.gram[j][i]:
                    raise LatticeError(f"{self.name}: gram is not symmetric at ({i}, {j})")

    @property
    def rank(self) -> int:
        return len(self.basis_names)

    def index(self, basis_name: str) -> int:
        try:
            return self.basis_names.index(basis_name)
        except ValueError:
            raise LatticeError(f"{self.name}: no basis element {basis_name!r}") from None

    def vector(self, coeffs: Iterable[int]) -> ClassVector:
        return ClassVector(self.name, tuple(coeffs))

    def basis_vector(self, basis_name: str) -> ClassVector:
        coeffs = [0] * self.rank
        coeffs[self.index(basis_name)] = 1
        return ClassVector(self.name, tuple(coeffs))

    def zero(self) -> ClassVector:
        return ClassVector(self.name, (0,) * self.rank)

    def combination(self, terms: Mapping[str, int]) -> ClassVector:
        """Vector with the given coefficient on each named basis element."""
        coeffs = [0] * self.rank
        for basis_name, c in terms.items():
            coeffs[self.index(basis_name)] += c
        return ClassVector(self.name, tuple(coeffs))

    def to_json(self) -> dict:
        return {"name": self.name, "basis": list(self.basis_names), "gram": [list(r) for r in self.gram]}

    @classmethod
    def from_json(cls, doc: Mapping) -> BilinearLattice:
        try:
            return cls(str(doc["name"]), tuple(doc["basis"]), tuple(tuple(r) for r in doc["gram"]))
        except (KeyError, TypeError) as exc:
            raise LatticeError(f"bad lattice document: {exc}") from exc


@dataclass(frozen=True)
class ClassVector:
    lattice: str
    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(_checked(int(c)) for c in self.coeffs))

    def _same(self, other: ClassVector) -> None:
        if not isinstance(other, ClassVector):
            raise TypeError(f"expected ClassVector, got {type(other).__name__}")
        if other.lattice != self.lattice or len(other.coeffs) != len(self.coeffs):
            raise LatticeError(f"lattice mismatch: {self.lattice} vs {other.lattice}")

    def __add__(self, other: ClassVector) -> ClassVector:
        self._same(other)
        return ClassVector(self.lattice, tuple(_checked(a + b) for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: ClassVector) -> ClassVector:
        self._same(other)
        return ClassVector(self.lattice, tuple(_checked(a - b) for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> ClassVector:
        return ClassVector(self.lattice, tuple(-a for a in self.coeffs))

    def __mul__(self, k: int) -> ClassVector:
        if not isinstance(k, int):
            return NotImplemented
        return ClassVector(self.lattice, tuple(_checked(k * a) for a in self.coeffs))

    __rmul__ = __mul__


def _require(lattice_name: str, *vectors: ClassVector, rank: int) -> None:
    for v in vectors:
        if v.lattice != lattice_name or len(v.coeffs) != rank:
            raise LatticeError(f"lattice mismatch: vector in {v.lattice!r}, expected {lattice_name!r}")


def pair(lattice: BilinearLattice, u: ClassVector, v: ClassVector) -> int:
    """Evaluate ``u^T G v``."""
    _require(lattice.name, u, v, rank=lattice.rank)
    gv = [_dot(row, v.coeffs) for row in lattice.gram]
    return _dot(u.coeffs, gv)


@dataclass(frozen=True)
class TripleRuleTable:
    """Symmetric trilinear form given on basis triples; missing triples are 0."""

    lattice: BilinearLattice
    entries: Mapping[tuple[int, int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        canon: dict[tuple[int, int, int], int] = {}
        for key, value in dict(self.entries).items():
            k = tuple(sorted(key))
            if len(k) != 3 or any(not 0 <= i < self.lattice.rank for i in k):
                raise LatticeError(f"bad triple index {key}")
            if k in canon and canon[k] != value:
                raise LatticeError(f"conflicting values for triple {k}")
            canon[k] = _checked(int(value))
        object.__setattr__(self, "entries", canon)
        expanded = [(ijk, v) for key, v in canon.items() for ijk in set(itertools.permutations(key))]
        object.__setattr__(self, "_expanded", tuple(sorted(expanded)))

    def value(self, i: int, j: int, k: int) -> int:
        return self.entries.get(tuple(sorted((i, j, k))), 0)


def triple(table: TripleRuleTable, d1: ClassVector, d2: ClassVector, d3: ClassVector) -> int:
    """Trilinear extension of the rule table."""
    lat = table.lattice
    _require(lat.name, d1, d2, d3, rank=lat.rank)
    acc = 0
    # sum over every ordering of every stored triple; absent triples contribute 0
    for (i, j, k), value in table._expanded:
        term = _checked(_checked(d1.coeffs[i] * d2.coeffs[j]) * d3.coeffs[k])
        acc = _checked(acc + _checked(value * term))
    return acc


@dataclass(frozen=True)
class DivisorCurvePairing:
    divisor_lattice: BilinearLattice
    curve_lattice: BilinearLattice
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        m = tuple(tuple(int(x) for x in row) for row in self.matrix)
        if len(m) != self.divisor_lattice.rank or any(len(r) != self.curve_lattice.rank for r in m):
            raise LatticeError("pairing matrix dimensions do not match the lattices")
        object.__setattr__(self, "matrix", m)


def pair_div_curve(p: DivisorCurvePairing, d: ClassVector, c: ClassVector) -> int:
    _require(p.divisor_lattice.name, d, rank=p.divisor_lattice.rank)
    _require(p.curve_lattice.name, c, rank=p.curve_lattice.rank)
    mc = [_dot(row, c.coeffs) for row in p.matrix]
    return _dot(d.coeffs, mc)


# ---------------------------------------------------------------------------
# Built-in lattices


def dp_picard(n_points: int = 7, name: str | None = None) -> BilinearLattice:
    """Pic of the plane blown up in ``n_points`` points: basis l, a_1..a_n, Gram diag(1, -1, ...)."""
    n = n_points + 1
    gram = [[0] * n for _ in range(n)]
    gram[0][0] = 1
    for i in range(1, n):
        gram[i][i] = -1
    basis = ("l",) + tuple(f"a{i}" for i in range(1, n_points + 1))
    return BilinearLattice(name or f"dp{9 - n_points}-picard", basis, gram)


def anticanonical(lattice: BilinearLattice) -> ClassVector:
    """-K = 3l - sum a_i on a blow-up of the plane."""
    return lattice.vector((3,) + (-1,) * (lattice.rank - 1))


N_NODES = 10


@lru_cache(maxsize=None)
def amx_divisors() -> BilinearLattice:
    # Identity Gram is a placeholder: intersection numbers on the threefold go
    # through amx_triple_table / amx_pairing, never through pair().
    basis = ("H",) + tuple(f"E{i}" for i in range(1, N_NODES + 1))
    n = len(basis)
    return BilinearLattice("amx-divisors", basis, [[int(i == j) for j in range(n)] for i in range(n)])


@lru_cache(maxsize=None)
def amx_curves() -> BilinearLattice:
    basis = ("l",) + tuple(f"e{i}" for i in range(1, N_NODES + 1))
    n = len(basis)
    return BilinearLattice("amx-curves", basis, [[int(i == j) for j in range(n)] for i in range(n)])


@lru_cache(maxsize=None)
def amx_triple_table() -> TripleRuleTable:
    """H^3 = 2 (degree of the double solid), E_i^3 = 2, mixed triples vanish."""
    lat = amx_divisors()
    entries = {(0, 0, 0): 2}
    for i in range(1, N_NODES + 1):
        entries[(i, i, i)] = 2
    return TripleRuleTable(lat, entries)


@lru_cache(maxsize=None)
def amx_pairing() -> DivisorCurvePairing:
    """H.l = 1, E_i.e_i = -1, everything else 0."""
    n = N_NODES + 1
    m = [[0] * n for _ in range(n)]
    m[0][0] = 1
    for i in range(1, n):
        m[i][i] = -1
    return DivisorCurvePairing(amx_divisors(), amx_curves(), m)


@lru_cache(maxsize=None)
def amx_anticanonical() -> ClassVector:
    """-K = 2H - sum E_i on the blown-up double solid."""
    return amx_divisors().vector((2,) + (-1,) * N_NODES)


def _e8_negative() -> list[list[int]]:
    # Cartan matrix of E8 (Bourbaki labelling), negated.
    edges = [(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)]
    m = [[0] * 8 for _ in range(8)]
    for i in range(8):
        m[i][i] = -2
    for i, j in edges:
        m[i][j] = m[j][i] = 1
    return m


@lru_cache(maxsize=None)
def enriques_numerical() -> BilinearLattice:
    """Num of an Enriques surface as U + E8(-1); used only for parity checks."""
    gram = [[0] * 10 for _ in range(10)]
    gram[0][1] = gram[1][0] = 1
    e8 = _e8_negative()
    for i in range(8):
        for j in range(8):
            gram[2 + i][2 + j] = e8[i][j]
    basis = ("u1", "u2") + tuple(f"r{i}" for i in range(1, 9))
    return BilinearLattice("enriques-numerical", basis, gram)


def is_even(lattice: BilinearLattice) -> bool:
    return all(lattice.gram[i][i] % 2 == 0 for i in range(lattice.rank))


BUILTIN = {
    "dp2-picard": lambda: dp_picard(7, "dp2-picard"),
    "amx-divisors": amx_divisors,
    "amx-curves": amx_curves,
    "enriques-numerical": enriques_numerical,
}


def builtin_lattice(name: str) -> BilinearLattice:
    try:
        return BUILTIN[name]()
    except KeyError:
        raise LatticeError(f"unknown built-in lattice {name!r}; known: {sorted(BUILTIN)}") from None


def load_lattice(path: str | Path) -> BilinearLattice:
    with open(path, encoding="utf-8") as fh:
        return BilinearLattice.from_json(json.load(fh))


def leading_minors(lattice: BilinearLattice) -> list[int]:
    """Leading principal minors of the Gram matrix, by exact fraction-free elimination."""
    n = lattice.rank
    a = [list(row) for row in lattice.gram]
    minors = []
    prev = 1
    # Bareiss; assumes nonzero pivots, which holds for the diagonal lattices used here.
    for k in range(n):
        minors.append(a[k][k])
        if a[k][k] == 0:
            break
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return minors


def signature(lattice: BilinearLattice) -> tuple[int, int]:
    """(positive, negative) inertia by exact symmetric elimination over Q.

    When every remaining diagonal entry is zero but an off-diagonal one is
    not, the basis is changed by e_i -> e_i + e_j to create a pivot.
    """
    n = lattice.rank
    a = [[Fraction(x) for x in row] for row in lattice.gram]
    pos = neg = 0
    live = list(range(n))
    while live:
        k = next((i for i in live if a[i][i] != 0), None)
        if k is None:
            pair_ij = next(((i, j) for i in live for j in live if i != j and a[i][j] != 0), None)
            if pair_ij is None:
                break  # the rest is radical
            i, j = pair_ij
            for r in range(n):
                a[i][r] += a[j][r]
            for r in range(n):
                a[r][i] += a[r][j]
            k = i
        piv = a[k][k]
        if piv > 0:
            pos += 1
        else:
            neg += 1
        live.remove(k)
        for i in live:
            f = a[i][k] / piv
            if f:
                for j in live:
                    a[i][j] -= f * a[k][j]
    return pos, neg
