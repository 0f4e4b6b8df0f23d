"""Lines and conic bundles on the degree-2 del Pezzo surface.

The surface is modelled as the plane blown up in seven points, with Picard
basis ``l, a_1..a_7``.  Lines are found twice (family formulas and an
exhaustive lattice search) and conic bundles are recovered from line pairs
meeting once, then matched against the five itemized fiber lists.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .lattice import BilinearLattice, ClassVector, anticanonical, dp_picard, pair

N_POINTS = 7
POINTS = tuple(range(1, N_POINTS + 1))
FAMILIES = ("A", "B", "C", "D")
BUNDLE_TYPES = ("I", "II", "III", "IV", "V")


class NotALineError(ValueError):
    pass


class NotAConicBundleError(ValueError):
    pass


class ConsistencyError(RuntimeError):
    """An internal cross-check between two computations failed."""


@dataclass(frozen=True)
class LineTag:
    family: str
    indices: tuple[int, ...]
    cls: ClassVector

    @property
    def name(self) -> str:
        return self.family + "".join(str(i) for i in self.indices)

    def __repr__(self) -> str:
        return f"LineTag({self.name})"


@dataclass(frozen=True)
class ConicBundleRecord:
    fiber_class: ClassVector
    bundle_type: str
    parameter: tuple[int, ...]
    singular_fibers: tuple[tuple[LineTag, LineTag], ...]

    @property
    def name(self) -> str:
        return f"{self.bundle_type}{self.parameter}"


def family_class(lattice: BilinearLattice, family: str, indices: tuple[int, ...]) -> ClassVector:
    """Class of A_i, B_ij, C_ij or D_i from its defining formula."""
    n = lattice.rank - 1
    c = [0] * (n + 1)
    if family == "A":
        (i,) = indices
        c[i] = 1
    elif family == "B":
        i, j = indices
        c[0] = 1
        c[i] = c[j] = -1
    elif family == "C":
        # conic through all blown-up points except those in ``indices``
        c[0] = 2
        for k in range(1, n + 1):
            if k not in indices:
                c[k] = -1
    elif family == "D":
        (i,) = indices
        c[0] = 3
        for k in range(1, n + 1):
            c[k] = -1
        c[i] -= 1
    else:
        raise ValueError(f"unknown line family {family!r}")
    return lattice.vector(c)


def _family_tags(lattice: BilinearLattice) -> list[LineTag]:
    n = lattice.rank - 1
    pts = range(1, n + 1)
    tags = [LineTag("A", (i,), family_class(lattice, "A", (i,))) for i in pts]
    tags += [LineTag("B", p, family_class(lattice, "B", p)) for p in itertools.combinations(pts, 2)]
    if n >= 5:
        tags += [LineTag("C", p, family_class(lattice, "C", p)) for p in itertools.combinations(pts, n - 5)]
    if n == 7:
        tags += [LineTag("D", (i,), family_class(lattice, "D", (i,))) for i in pts]
    return tags


def brute_force_lines(lattice: BilinearLattice, bound: int = 3) -> set[tuple[int, ...]]:
    """All v with |coeff| <= bound, v.v = -1 and v.(-K) = 1, by exhaustive grid search."""
    n = lattice.rank
    gram_int = np.array(lattice.gram, dtype=np.int64)
    # float64 matmul goes through BLAS; exact while every partial sum stays below 2**53
    if int(np.abs(gram_int).max()) * (bound * n) ** 2 * 3 >= 2**53:
        raise ValueError("Gram entries too large for the exact grid search")
    gram = gram_int.astype(np.float64)
    antik = np.array(anticanonical(lattice).coeffs, dtype=np.float64)
    values = np.arange(-bound, bound + 1, dtype=np.float64)
    found: set[tuple[int, ...]] = set()
    # Grid over the trailing coordinates r; for v = (d, r),
    # v.v = d^2 g00 + 2 d (g0r . r) + r.Grr.r, and v.(-K) is affine in d.
    if n == 1:
        rest = np.zeros((1, 0))
    else:
        rest = np.stack(np.meshgrid(*([values] * (n - 1)), indexing="ij"), axis=-1).reshape(-1, n - 1)
    q_rest = ((rest @ gram[1:, 1:]) * rest).sum(axis=1)
    lin = rest @ gram[1:, 0]
    gk = gram @ antik
    deg_rest = rest @ gk[1:]
    for d in values:
        sq = d * d * gram[0, 0] + 2 * d * lin + q_rest
        deg = d * gk[0] + deg_rest
        for row in rest[(sq == -1) & (deg == 1)]:
            found.add((int(d),) + tuple(int(x) for x in row))
    return found


def enumerate_lines(n_points: int = N_POINTS, lattice: BilinearLattice | None = None) -> list[LineTag]:
    """The (-1)-classes of the plane blown up in ``n_points`` points, in canonical order.

    The family formulas and the brute-force search must produce the same set
    of classes, otherwise :class:`ConsistencyError` is raised.
    """
    if not 0 <= n_points <= N_POINTS:
        raise ValueError("only blow-ups in at most 7 points are supported")
    lattice = lattice or dp_picard(n_points, "dp2-picard" if n_points == N_POINTS else None)
    if lattice.rank != n_points + 1:
        raise ValueError("lattice rank does not match the number of points")
    tags = _family_tags(lattice) if n_points >= 1 else []
    formula = {t.cls.coeffs for t in tags}
    brute = brute_force_lines(lattice)
    if formula != brute or len(formula) != len(tags):
        missing = sorted(brute - formula)[:3]
        extra = sorted(formula - brute)[:3]
        raise ConsistencyError(f"line families disagree with lattice search: missing {missing}, spurious {extra}")
    return tags


@lru_cache(maxsize=None)
def lines() -> tuple[LineTag, ...]:
    """The 56 lines of the degree-2 del Pezzo surface (cached)."""
    return tuple(enumerate_lines())


@lru_cache(maxsize=None)
def picard() -> BilinearLattice:
    return dp_picard(N_POINTS, "dp2-picard")


@lru_cache(maxsize=None)
def _line_index() -> dict[tuple[int, ...], int]:
    return {t.cls.coeffs: k for k, t in enumerate(lines())}


def line_index(tag_or_class) -> int:
    coeffs = tag_or_class.cls.coeffs if isinstance(tag_or_class, LineTag) else tag_or_class.coeffs
    try:
        return _line_index()[coeffs]
    except KeyError:
        raise NotALineError(f"{coeffs} is not the class of a line") from None


def line(family: str, *indices: int) -> LineTag:
    """Look up a line by name, e.g. ``line("B", 2, 5)``; index order is irrelevant."""
    key = (family, tuple(sorted(indices)))
    for t in lines():
        if (t.family, t.indices) == key:
            return t
    raise NotALineError(f"no line {family}{indices}")


def geiser(t: LineTag) -> LineTag:
    """Image under the Geiser involution: the line with class -K - class(t)."""
    lat = picard()
    if t.cls.coeffs not in _line_index():
        raise NotALineError(f"{t!r} is not one of the 56 lines")
    image = anticanonical(lat) - t.cls
    return lines()[line_index(image)]


def geiser_class(f: ClassVector) -> ClassVector:
    """Geiser involution on all of Pic(S): v -> -v + (v.(-K)) (-K)."""
    lat = picard()
    antik = anticanonical(lat)
    return -f + pair(lat, f, antik) * antik


# ---------------------------------------------------------------------------
# Conic bundles


def itemized_fibers(bundle_type: str, parameter: tuple[int, ...]) -> frozenset[frozenset[str]]:
    """Singular fibers of a conic bundle as listed family by family, as sets of line names."""

    def nm(family, *idx):
        return family + "".join(str(i) for i in sorted(idx))

    def fib(x, y):
        return frozenset((x, y))

    out = []
    if bundle_type == "I":
        (i,) = parameter
        out = [fib(nm("A", j), nm("B", i, j)) for j in POINTS if j != i]
    elif bundle_type == "II":
        lam = set(parameter)
        rest = [k for k in POINTS if k not in lam]
        out = [fib(nm("A", x), nm("C", *(lam - {x}))) for x in sorted(lam)]
        for gamma in itertools.combinations(rest, 2):
            delta = tuple(k for k in rest if k not in gamma)
            out.append(fib(nm("B", *gamma), nm("B", *delta)))
    elif bundle_type == "III":
        i, j = parameter
        out = [fib(nm("A", j), nm("D", i))]
        out += [fib(nm("B", i, k), nm("C", j, k)) for k in POINTS if k not in (i, j)]
    elif bundle_type == "IV":
        lam = set(parameter)
        rest = [k for k in POINTS if k not in lam]
        out = [fib(nm("B", *(lam - {x})), nm("D", x)) for x in sorted(lam)]
        for gamma in itertools.combinations(rest, 2):
            delta = tuple(k for k in rest if k not in gamma)
            out.append(fib(nm("C", *gamma), nm("C", *delta)))
    elif bundle_type == "V":
        (i,) = parameter
        out = [fib(nm("C", i, j), nm("D", j)) for j in POINTS if j != i]
    else:
        raise ValueError(f"unknown bundle type {bundle_type!r}")
    return frozenset(out)


def bundle_parameters(bundle_type: str) -> list[tuple[int, ...]]:
    if bundle_type in ("I", "V"):
        return [(i,) for i in POINTS]
    if bundle_type in ("II", "IV"):
        return list(itertools.combinations(POINTS, 3))
    if bundle_type == "III":
        return list(itertools.permutations(POINTS, 2))
    raise ValueError(f"unknown bundle type {bundle_type!r}")


@lru_cache(maxsize=None)
def _itemized_by_class() -> dict[tuple[int, ...], tuple[str, tuple[int, ...]]]:
    by_name = {t.name: t for t in lines()}
    table = {}
    for btype in BUNDLE_TYPES:
        for param in bundle_parameters(btype):
            first = next(iter(itemized_fibers(btype, param)))
            x, y = (by_name[n] for n in first)
            table[(x.cls + y.cls).coeffs] = (btype, param)
    return table


def _line_pair_groups() -> dict[tuple[int, ...], list[tuple[int, int]]]:
    lat = picard()
    ls = lines()
    groups: dict[tuple[int, ...], list[tuple[int, int]]] = defaultdict(list)
    for p, q in itertools.combinations(range(len(ls)), 2):
        if pair(lat, ls[p].cls, ls[q].cls) == 1:
            groups[(ls[p].cls + ls[q].cls).coeffs].append((p, q))
    return groups


def is_conic_class(f: ClassVector) -> bool:
    lat = picard()
    return pair(lat, f, f) == 0 and pair(lat, f, anticanonical(lat)) == 2


def classify_conic_bundle(f: ClassVector) -> tuple[str, tuple[int, ...]]:
    """Type (I..V) and parameter of the conic bundle with fiber class ``f``."""
    if not is_conic_class(f):
        raise NotAConicBundleError(f"{f.coeffs} does not satisfy f^2 = 0, f.(-K) = 2")
    try:
        return _itemized_by_class()[f.coeffs]
    except KeyError:
        raise NotAConicBundleError(f"{f.coeffs} is not the fiber class of a conic bundle") from None


def _type_order(btype: str) -> int:
    return BUNDLE_TYPES.index(btype)


@lru_cache(maxsize=None)
def conic_bundles() -> tuple[ConicBundleRecord, ...]:
    """All 126 conic bundles, ordered by type then parameter.

    Fibers are derived from pairs of lines meeting once, grouped by their sum;
    each group is required to have six members and to coincide with the
    itemized list for its type.
    """
    lat = picard()
    ls = lines()
    records = []
    for coeffs, members in _line_pair_groups().items():
        f = lat.vector(coeffs)
        if len(members) != 6:
            raise ConsistencyError(f"fiber class {coeffs} has {len(members)} line-pair splittings, expected 6")
        btype, param = classify_conic_bundle(f)
        found = frozenset(frozenset((ls[p].name, ls[q].name)) for p, q in members)
        if found != itemized_fibers(btype, param):
            raise ConsistencyError(f"fibers of {btype}{param} differ from the itemized list")
        fibers = tuple(sorted(((ls[p], ls[q]) for p, q in members), key=lambda pq: (line_index(pq[0]), line_index(pq[1]))))
        records.append(ConicBundleRecord(f, btype, param, fibers))
    records.sort(key=lambda r: (_type_order(r.bundle_type), r.parameter))
    if len({r.fiber_class.coeffs for r in records}) != len(_itemized_by_class()):
        missing = set(_itemized_by_class()) - {r.fiber_class.coeffs for r in records}
        raise ConsistencyError(f"itemized bundles without line-pair fibers: {sorted(missing)[:3]}")
    return tuple(records)


def enumerate_conic_bundles() -> list[ConicBundleRecord]:
    return list(conic_bundles())


def bundle_index(bundle_type: str, parameter: tuple[int, ...]) -> int:
    for k, r in enumerate(conic_bundles()):
        if r.bundle_type == bundle_type and r.parameter == tuple(parameter):
            return k
    raise KeyError(f"no bundle {bundle_type}{parameter}")


def type_counts(records) -> dict[str, int]:
    c = Counter(r.bundle_type for r in records)
    return {t: c.get(t, 0) for t in BUNDLE_TYPES}


def family_counts(tags) -> dict[str, int]:
    c = Counter(t.family for t in tags)
    return {f: c.get(f, 0) for f in FAMILIES}


# ---------------------------------------------------------------------------
# JSON export


def lines_report() -> dict:
    return {
        "lines": [
            {"family": t.family, "indices": list(t.indices), "coeffs": list(t.cls.coeffs)} for t in lines()
        ]
    }


def bundles_report() -> dict:
    return {
        "bundles": [
            {
                "type": r.bundle_type,
                "parameter": list(r.parameter),
                "fiber_coeffs": list(r.fiber_class.coeffs),
                "fibers": [[line_index(x), line_index(y)] for x, y in r.singular_fibers],
            }
            for r in conic_bundles()
        ]
    }
