"""Curve classes on the blown-up Artin-Mumford double solid and the Z/2
bookkeeping separating algebraic from numerical equivalence.

Curve lattice basis: ``l`` (strict transform of a general H-line) and
``e1..e10`` (a ruling of the exceptional quadric over each node).  Every
numerical class holds two algebraic classes; a torsion bit in Z/2 tells them
apart.  Unknowns of the relation system are named ``t(<symbol>^+)`` /
``t(<symbol>^-)``, e.g. ``t(e_3^+)`` or ``t(l_{1,2}^-)``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .gf2 import LinearSystem, Solution, solve_gf2
from .lattice import N_NODES, ClassVector, amx_anticanonical, amx_curves, amx_pairing, pair_div_curve

NODES = tuple(range(1, N_NODES + 1))


@dataclass(frozen=True)
class TorsionedCycle:
    numerical: ClassVector
    torsion: int
    label: str | None = None

    def __post_init__(self):
        if self.torsion not in (0, 1):
            raise ValueError("torsion bit must be 0 or 1")

    def __add__(self, other: TorsionedCycle) -> TorsionedCycle:
        return TorsionedCycle(self.numerical + other.numerical, self.torsion ^ other.torsion)

    def algebraically_equal(self, other: TorsionedCycle) -> bool:
        return self.numerical == other.numerical and self.torsion == other.torsion

    def numerically_equal(self, other: TorsionedCycle) -> bool:
        return self.numerical == other.numerical


_LABEL = re.compile(r"^(?P<sym>l|e)(?:_?\{?(?P<i>\d+)(?:,(?P<j>\d+))?\}?)?$")


def _parse(label: str) -> tuple[str, tuple[int, ...]]:
    m = _LABEL.match(label.replace(" ", "").replace("ℓ̃", "l").replace("ℓ", "l"))
    if not m:
        raise ValueError(f"unknown curve label {label!r}")
    idx = tuple(int(x) for x in (m["i"], m["j"]) if x is not None)
    if m["sym"] == "e" and len(idx) != 1:
        raise ValueError(f"e needs exactly one index: {label!r}")
    for i in idx:
        if i not in NODES:
            raise ValueError(f"node index {i} out of range 1..{N_NODES}")
    if len(idx) == 2 and idx[0] == idx[1]:
        raise ValueError(f"l_{{i,j}} needs distinct indices: {label!r}")
    return m["sym"], idx


def named_class(label: str) -> ClassVector:
    """Numerical class of ``l``, ``e_i``, ``l_i = l - e_i`` or ``l_{i,j} = l - e_i - e_j``."""
    sym, idx = _parse(label)
    lat = amx_curves()
    c = [0] * lat.rank
    if sym == "e":
        c[idx[0]] = 1
    else:
        c[0] = 1
        for i in idx:
            c[i] -= 1
    return lat.vector(c)


def anticanonical_degree(c: ClassVector) -> int:
    """-K . c with -K = 2H - sum E_i."""
    return pair_div_curve(amx_pairing(), amx_anticanonical(), c)


# ---------------------------------------------------------------------------
# Relation system


def t(symbol: str, sign: str) -> str:
    return f"t({symbol}^{sign})"


def _l(i: int) -> str:
    return f"l_{i}"


def _lij(i: int, j: int) -> str:
    a, b = sorted((i, j))
    return f"l_{{{a},{b}}}"


def _e(i: int) -> str:
    return f"e_{i}"


def build_am_relation_system(
    pairs=None,
    *,
    conjugates: bool = True,
    decompositions: bool = True,
) -> LinearSystem:
    """Z/2 relations among torsion bits of the curves over the nodes.

    For each ordered pair (i, j) of distinct nodes:

    * the two specialisations ``l_i^+ -> l_{i,j}^+ + e_j^+`` and
      ``l_i^- -> l_{i,j}^+ + e_j^-``;
    * with ``conjugates``, the involution image of the first one,
      ``l_i^+ ~ iota(l_i^+) -> l_{i,j}^- + e_j^-``;

    for each node i the non-equivalence ``t(l_i^+) + t(l_i^-) = 1``, and with
    ``decompositions`` the splitting ``l = l_{i,j} + e_i + e_j`` of the general
    line for each unordered pair, together with its involution image.

    ``l_{i,j}`` is symmetric in i, j: both orders share the unknowns.  The
    specialisations through (i, j) and (j, i) use the same ``+`` label.
    """
    if pairs is None:
        pairs = list(itertools.permutations(NODES, 2))
    pairs = [tuple(p) for p in pairs]
    for i, j in pairs:
        if i == j or i not in NODES or j not in NODES:
            raise ValueError(f"bad node pair {(i, j)}")
    nodes_i = sorted({i for i, _ in pairs})
    unordered = sorted({tuple(sorted(p)) for p in pairs})

    unknowns: list[str] = []

    def declare(name: str) -> None:
        if name not in unknowns:
            unknowns.append(name)

    if decompositions:
        declare(t("l", "+"))
        declare(t("l", "-"))
    for i in nodes_i:
        declare(t(_l(i), "+"))
        declare(t(_l(i), "-"))
    for i, j in pairs:
        declare(t(_lij(i, j), "+"))
        if conjugates:
            declare(t(_lij(i, j), "-"))
        declare(t(_e(j), "+"))
        declare(t(_e(j), "-"))
    if decompositions:
        for i, j in unordered:
            for k in (i, j):
                declare(t(_e(k), "+"))
                declare(t(_e(k), "-"))
            declare(t(_lij(i, j), "-"))

    system = LinearSystem(unknowns)
    for i, j in pairs:
        system.add(
            [t(_l(i), "+"), t(_lij(i, j), "+"), t(_e(j), "+")], 0,
            f"specialisation of l_{i}^+ at q_{j} along delta_{i}^+: l_{i}^+ -> l_{{{min(i, j)},{max(i, j)}}}^+ + e_{j}^+",
        )
        system.add(
            [t(_l(i), "-"), t(_lij(i, j), "+"), t(_e(j), "-")], 0,
            f"specialisation of l_{i}^- at q_{j} along delta_{i}^-: l_{i}^- -> l_{{{min(i, j)},{max(i, j)}}}^+ + e_{j}^-",
        )
        if conjugates:
            system.add(
                [t(_l(i), "+"), t(_lij(i, j), "-"), t(_e(j), "-")], 0,
                f"involution image of the first specialisation; components of a fiber over delta_{i}^+ "
                f"are algebraically equivalent",
            )
    for i in nodes_i:
        system.add(
            [t(_l(i), "+"), t(_l(i), "-")], 1,
            f"l_{i}^+ and l_{i}^- lie over different discriminant components and are not algebraically equivalent",
        )
    if decompositions:
        for i, j in unordered:
            for sign in ("+", "-"):
                system.add(
                    [t("l", sign), t(_lij(i, j), sign), t(_e(i), sign), t(_e(j), sign)], 0,
                    f"degeneration l^{sign} -> l_{{{i},{j}}}^{sign} + e_{i}^{sign} + e_{j}^{sign} (l = l_{{i,j}} + e_i + e_j)",
                )
    return system


def conjugate_pairs(system: LinearSystem) -> list[tuple[str, str, str]]:
    """(symbol, plus-unknown, minus-unknown) for every symbol declared with both signs."""
    names = set(system.unknowns)
    out = []
    seen = set()
    for u in system.unknowns:
        m = re.match(r"^t\((.*)\^([+-])\)$", u)
        if not m or m[1] in seen:
            continue
        plus, minus = t(m[1], "+"), t(m[1], "-")
        if plus in names and minus in names:
            out.append((m[1], plus, minus))
            seen.add(m[1])
    return out


def forced_consequences(system: LinearSystem, sol: Solution) -> list[dict]:
    """Forced values of ``t(x^+) + t(x^-)`` for each symbol, and of single unknowns."""
    out = []
    for sym, plus, minus in conjugate_pairs(system):
        v = sol.implied(system.row([plus, minus]))
        if v is not None:
            out.append({"terms": [plus, minus], "rhs": v})
    for u in system.unknowns:
        v = sol.implied(system.row([u]))
        if v is not None:
            out.append({"terms": [u], "rhs": v})
    return out


def solve_report(system: LinearSystem) -> dict:
    sol = solve_gf2(system)
    doc = {
        "n_unknowns": len(system.unknowns),
        "n_equations": len(system.equations),
        "consistent": sol.consistent,
        "rank": sol.rank,
    }
    if not sol.consistent:
        doc["core"] = [
            {"index": k, **system.to_json()["equations"][k]} for k in sol.core
        ]
        return doc
    doc["free_variables"] = sol.n_free
    doc["reduced"] = [{"terms": system.names(r), "rhs": b} for r, b in sol.reduced]
    doc["particular_solution"] = {u: sol.particular[k] for k, u in enumerate(system.unknowns)}
    doc["forced"] = forced_consequences(system, sol)
    return doc
