"""Riemann-Roch on Enriques surfaces and numerical splittings of a divisor.

Only numerical invariants are used: the self-intersection of a class and the
pairwise intersections of the parts of a decomposition.  Geometric inputs
(effectivity, nefness and bigness, the vanishing of h^1 and h^2) are carried
as flags on the datum rather than derived.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass


class ParityError(ValueError):
    """Self-intersections on an Enriques surface are even."""


@dataclass(frozen=True)
class EnriquesDivisorDatum:
    self_intersection: int
    effectivity_assumed: bool = True
    nef_big_assumed: bool = False

    def __post_init__(self):
        if self.self_intersection % 2:
            raise ParityError(f"D^2 = {self.self_intersection} is odd")


@dataclass(frozen=True)
class LinearSystemDim:
    value: int
    exact: bool

    def to_json(self) -> dict:
        return {"value": self.value, "exact": self.exact}


def chi(d: EnriquesDivisorDatum | int) -> int:
    """chi(D) = D^2/2 + 1 (chi(O) = 1 and K numerically trivial)."""
    sq = d.self_intersection if isinstance(d, EnriquesDivisorDatum) else d
    if sq % 2:
        raise ParityError(f"D^2 = {sq} is odd")
    return sq // 2 + 1


def linear_system_dim(d: EnriquesDivisorDatum | int) -> LinearSystemDim:
    """dim |D| for an effective divisor.

    For D^2 >= 4 the divisor is taken to be nef and big, so h^1 = h^2 = 0 and
    dim |D| = chi(D) - 1 = D^2/2 exactly.  For D^2 <= 2 only the bound
    dim |D| <= 1 is returned.
    """
    if isinstance(d, int):
        d = EnriquesDivisorDatum(d, effectivity_assumed=True, nef_big_assumed=d >= 4)
    if not d.effectivity_assumed:
        raise ValueError("linear_system_dim needs an effective divisor")
    if d.self_intersection >= 4:
        return LinearSystemDim(chi(d) - 1, True)
    return LinearSystemDim(1, False)


@dataclass(frozen=True)
class DecompositionConstraint:
    total_square: int
    num_parts: int = 2
    min_part_square: int = 0
    min_cross: int = 0

    def __post_init__(self):
        if self.num_parts < 2:
            raise ValueError("a decomposition needs at least two parts")


def _even_at_least(n: int) -> int:
    return n if n % 2 == 0 else n + 1


def _canonical(xs: tuple[int, ...], zs: dict[tuple[int, int], int], n: int) -> tuple[int, ...]:
    best = None
    for perm in itertools.permutations(range(n)):
        x = tuple(xs[p] for p in perm)
        z = tuple(zs[tuple(sorted((perm[a], perm[b])))] for a, b in itertools.combinations(range(n), 2))
        cand = x + z
        if best is None or cand < best:
            best = cand
    return best


def enumerate_decompositions(c: DecompositionConstraint) -> list[tuple[int, ...]]:
    """All (x_1..x_n, z_12, z_13, .., z_{n-1,n}) with sum x + 2 sum z = total.

    Part squares x_i are even and >= min_part_square; cross terms
    z_ij >= min_cross.  Tuples are listed once per reordering of the parts
    (the lexicographically least reordering) and sorted.
    """
    n = c.num_parts
    pairs = list(itertools.combinations(range(n), 2))
    x_min = _even_at_least(c.min_part_square)
    z_min = c.min_cross
    slack = c.total_square - n * x_min - 2 * len(pairs) * z_min
    if slack < 0:
        return []
    out = set()

    def split_z(k: int, budget: int, zs: list[int], xs: tuple[int, ...]):
        if k == len(pairs):
            if budget == 0:
                zd = dict(zip(pairs, zs))
                out.add(_canonical(xs, zd, n))
            return
        for extra in range(0, budget // 2 + 1):
            split_z(k + 1, budget - 2 * extra, zs + [z_min + extra], xs)

    def split_x(k: int, budget: int, xs: list[int]):
        if k == n:
            split_z(0, budget, [], tuple(xs))
            return
        for extra in range(0, budget + 1, 2):
            split_x(k + 1, budget - extra, xs + [x_min + extra])

    split_x(0, slack, [])
    return sorted(out)


def hodge_index_flag(x: int, y: int, z: int) -> bool:
    """False when two positive-square classes would violate z^2 >= x*y."""
    return x <= 0 or y <= 0 or z * z >= x * y
