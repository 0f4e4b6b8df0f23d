"""Affine linear systems over GF(2).

Rows are Python ints used as bitsets over the unknowns (bit k = unknown k).
Elimination produces the reduced row echelon form, which is unique for a
fixed unknown order, so reduction is deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Equation:
    terms: tuple[str, ...]
    rhs: int
    provenance: str = ""


@dataclass
class LinearSystem:
    unknowns: list[str]
    equations: list[Equation] = field(default_factory=list)

    def __post_init__(self):
        if len(set(self.unknowns)) != len(self.unknowns):
            raise ValueError("duplicate unknown names")
        self._pos = {u: k for k, u in enumerate(self.unknowns)}
        for eq in self.equations:
            self._check(eq)

    def _check(self, eq: Equation) -> None:
        for t in eq.terms:
            if t not in self._pos:
                raise ValueError(f"equation references undeclared unknown {t!r}")
        if eq.rhs not in (0, 1):
            raise ValueError("rhs must be 0 or 1")

    def add(self, terms, rhs: int, provenance: str = "") -> None:
        eq = Equation(tuple(terms), rhs, provenance)
        self._check(eq)
        self.equations.append(eq)

    def row(self, terms) -> int:
        r = 0
        for t in terms:
            r ^= 1 << self._pos[t]
        return r

    def rows(self) -> list[tuple[int, int]]:
        return [(self.row(eq.terms), eq.rhs) for eq in self.equations]

    def names(self, row: int) -> list[str]:
        return [u for k, u in enumerate(self.unknowns) if (row >> k) & 1]

    def to_json(self) -> dict:
        return {
            "unknowns": list(self.unknowns),
            "equations": [{"terms": list(e.terms), "rhs": e.rhs, "provenance": e.provenance} for e in self.equations],
        }

    @classmethod
    def from_json(cls, doc: dict) -> LinearSystem:
        try:
            eqs = [Equation(tuple(e["terms"]), int(e["rhs"]), str(e.get("provenance", ""))) for e in doc["equations"]]
            return cls(list(doc["unknowns"]), eqs)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"bad relation-system document: {exc}") from exc


@dataclass
class Solution:
    consistent: bool
    rank: int
    n_unknowns: int
    pivots: list[int]
    reduced: list[tuple[int, int]]
    particular: list[int] | None
    core: list[int] | None = None

    @property
    def n_free(self) -> int:
        return self.n_unknowns - self.rank

    @property
    def n_solutions(self) -> int:
        return 2**self.n_free if self.consistent else 0

    def implied(self, row: int) -> int | None:
        """Value forced on ``sum of unknowns in row`` by the system, or None if it is free."""
        if not self.consistent:
            raise ValueError("inconsistent system implies everything")
        value = 0
        for (r, b), p in zip(self.reduced, self.pivots):
            if (row >> p) & 1:
                row ^= r
                value ^= b
        return value if row == 0 else None

    def satisfies(self, assignment: list[int], row: int, rhs: int) -> bool:
        acc = 0
        for k, bit in enumerate(assignment):
            if bit and (row >> k) & 1:
                acc ^= 1
        return acc == rhs


def _eliminate(rows: list[tuple[int, int]], n: int):
    """RREF with pivot on the lowest unknown index.  Returns (pivot rows, pivots, bad) where
    ``bad`` is the combination mask (over input rows) of a derived 0 = 1, or None."""
    basis: dict[int, tuple[int, int, int]] = {}  # pivot -> (row, rhs, combination)
    bad = None
    for k, (r, b) in enumerate(rows):
        comb = 1 << k
        while r:
            p = (r & -r).bit_length() - 1
            if p not in basis:
                break
            pr, pb, pc = basis[p]
            r ^= pr
            b ^= pb
            comb ^= pc
        if r == 0:
            if b and bad is None:
                bad = comb
            continue
        p = (r & -r).bit_length() - 1
        basis[p] = (r, b, comb)
    pivots = sorted(basis)
    # back-substitution to reduced form
    for p in reversed(pivots):
        r, b, c = basis[p]
        for q in pivots:
            if q != p and (basis[q][0] >> p) & 1:
                qr, qb, qc = basis[q]
                basis[q] = (qr ^ r, qb ^ b, qc ^ c)
    return basis, pivots, bad


def _is_consistent(rows, n) -> bool:
    return _eliminate(rows, n)[2] is None


def solve_gf2(system: LinearSystem) -> Solution:
    rows = system.rows()
    n = len(system.unknowns)
    basis, pivots, bad = _eliminate(rows, n)
    reduced = [(basis[p][0], basis[p][1]) for p in pivots]
    if bad is not None:
        core = [k for k in range(len(rows)) if (bad >> k) & 1]
        # deletion pass: drop equations while the rest stays inconsistent
        for k in list(core):
            trial = [j for j in core if j != k]
            if not _is_consistent([rows[j] for j in trial], n):
                core = trial
        return Solution(False, len(pivots), n, pivots, reduced, None, core)
    particular = [0] * n
    for (r, b), p in zip(reduced, pivots):
        particular[p] = b  # free unknowns set to 0
    return Solution(True, len(pivots), n, pivots, reduced, particular)


def truth_table_count(system: LinearSystem) -> int:
    """Number of solutions by trying every assignment (independent oracle, small systems only)."""
    n = len(system.unknowns)
    if n > 24:
        raise ValueError("truth table limited to 24 unknowns")
    rows = system.rows()
    count = 0
    for bits in itertools.product((0, 1), repeat=n):
        x = sum(b << k for k, b in enumerate(bits))
        if all(bin(x & r).count("1") % 2 == b for r, b in rows):
            count += 1
    return count


def truth_table_implied(system: LinearSystem, terms) -> int | None:
    """Forced value of a sum of unknowns by enumeration; None if it varies or no solution."""
    n = len(system.unknowns)
    rows = system.rows()
    target = system.row(terms)
    seen = set()
    for bits in itertools.product((0, 1), repeat=n):
        x = sum(b << k for k, b in enumerate(bits))
        if all(bin(x & r).count("1") % 2 == b for r, b in rows):
            seen.add(bin(x & target).count("1") % 2)
    return seen.pop() if len(seen) == 1 else None
