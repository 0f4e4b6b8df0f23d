"""Exhaustive verification of the sign lemma for conic bundles.

Three strategies cover the 2^28 admissible sign assignments:

``naive``
    scan every assignment, sharded by the seven A-bits (128 shards);
``reduced``
    scan only the A-patterns ``+^M -^(7-M)`` with M >= 4 and weight each
    count by the size of its S7 x {+-1} orbit of A-patterns;
``propagation``
    enumerate the homogeneous assignments directly by DFS.

Every strategy must agree on the hypothesis count and report zero
conclusion failures.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .. import dp2
from . import kernels
from .encoding import (
    FULL_MASK,
    N_A,
    N_B,
    N_BITS,
    SignAssignment,
    canonicalize,
    fiber_table,
    hypothesis_constraints,
    orbit,
    orbit_size,
)
from .propagation import enumerate_homogeneous

STRATEGIES = ("naive", "reduced", "propagation")
_STRATEGY_ALIASES = {"symmetry-reduced": "reduced"}
_FOUND_LIMIT = 1 << 16


class StrategyDisagreement(RuntimeError):
    def __init__(self, message: str, assignment: SignAssignment | None):
        super().__init__(message)
        self.assignment = assignment


# ---------------------------------------------------------------------------
# Single-assignment operations


def mixed_profile(s: SignAssignment, bundles=None) -> list[tuple[int, int, int]]:
    """Per bundle: (mixed, (+,+), (-,-)) fiber counts."""
    if bundles is None:
        bundles = dp2.conic_bundles()
    out = []
    for rec in bundles:
        nm = npp = nmm = 0
        for x, y in rec.singular_fibers:
            a, b = s.sign(x), s.sign(y)
            if a != b:
                nm += 1
            elif a == 1:
                npp += 1
            else:
                nmm += 1
        out.append((nm, npp, nmm))
    return out


def _fiber_bits(x: int, fibs) -> list[tuple[int, int]]:
    return [(((x >> v) & 1) ^ p, ((x >> w) & 1) ^ q) for v, p, w, q in fibs]


def is_hypothesis_satisfying(s: SignAssignment) -> bool:
    """Every bundle has all six fibers mixed or none mixed."""
    for fibs in fiber_table().tolist():
        mixed = {a ^ b for a, b in _fiber_bits(s.bits, fibs)}
        if len(mixed) > 1:
            return False
    return True


def conclusion_holds(s: SignAssignment) -> int | None:
    """Index of the first bundle having a (+,+) fiber and a (-,-) fiber, else None."""
    for k, fibs in enumerate(fiber_table().tolist()):
        pairs = _fiber_bits(s.bits, fibs)
        if (1, 1) in pairs and (0, 0) in pairs:
            return k
    return None


# ---------------------------------------------------------------------------
# Reports


@dataclass
class VerificationReport:
    strategy: str
    total_scanned: int
    hypothesis_satisfying: int
    conclusion_failures: int
    representatives: list[dict]
    wall_time: float = 0.0
    slice_m: int | None = None
    backend: str = kernels.BACKEND
    satisfying: frozenset[int] = field(default=frozenset(), repr=False)

    def to_json(self, timing: bool = True) -> dict:
        doc = {
            "strategy": self.strategy,
            "total_scanned": self.total_scanned,
            "hypothesis_satisfying": self.hypothesis_satisfying,
            "conclusion_failures": self.conclusion_failures,
            "representatives": self.representatives,
        }
        if self.slice_m is not None:
            doc["slice"] = {"m": self.slice_m}
        if timing:
            doc["wall_time_ms"] = round(self.wall_time * 1000, 3)
            doc["backend"] = self.backend
        return doc


def _representatives(patterns) -> list[dict]:
    bundles = dp2.conic_bundles()
    reps = {}
    for x in patterns:
        canon, _, _ = canonicalize(SignAssignment(x))
        if canon.bits in reps:
            continue
        w = conclusion_holds(canon)
        reps[canon.bits] = {
            "canonical": canon.describe(),
            "m": canon.m,
            "orbit_size": orbit_size(canon),
            "witness": w,
            "witness_bundle": None if w is None else bundles[w].name,
            "failure": w is None,
        }
    return [reps[k] for k in sorted(reps)]


def slice_a_bits(m: int) -> int:
    """A-pattern with sign(A_i) = +1 iff i <= m."""
    if not 0 <= m <= N_A:
        raise ValueError(f"slice m must be in 0..7, got {m}")
    return (1 << m) - 1


# ---------------------------------------------------------------------------
# Strategies


def _scan_shard(a_bits: int) -> tuple[int, int, int, list]:
    masks, rhs = hypothesis_constraints()
    n_sat, n_fail, found = kernels.scan_block(masks, rhs, fiber_table(), a_bits, N_A, 1 << N_B, _FOUND_LIMIT)
    return a_bits, n_sat, n_fail, found


def _map_shards(shard_ids, parallelism: int):
    if parallelism <= 1 or len(shard_ids) <= 1:
        return [_scan_shard(a) for a in shard_ids]
    with ProcessPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(_scan_shard, shard_ids, chunksize=max(1, len(shard_ids) // (4 * parallelism))))


def _naive(slice_m, parallelism):
    shards = list(range(1 << N_A)) if slice_m is None else [slice_a_bits(slice_m)]
    results = sorted(_map_shards(shards, parallelism))
    n_sat = sum(r[1] for r in results)
    n_fail = sum(r[2] for r in results)
    found = [x for r in results for x, _ in r[3]]
    if len(found) != n_sat:
        raise RuntimeError("more satisfying assignments than the collection limit")
    return len(shards) << N_B, n_sat, n_fail, frozenset(found)


def _reduced(slice_m, parallelism):
    # A-patterns of weight M and 7-M form one orbit under S7 x flip of size 2*C(7, M).
    heads = [4, 5, 6, 7] if slice_m is None else [max(slice_m, N_A - slice_m)]
    results = {r[0]: r for r in _map_shards([slice_a_bits(m) for m in heads], parallelism)}
    total = n_sat = n_fail = 0
    found: set[int] = set()
    for m in heads:
        _, sat, fail, hits = results[slice_a_bits(m)]
        weight = 2 * math.comb(N_A, m) if slice_m is None else 1
        total += weight << N_B
        n_sat += weight * sat
        n_fail += weight * fail
        for x, _ in hits:
            found |= orbit(SignAssignment(x))
    if slice_m is not None:
        found = {x for x in found if x & 0x7F == slice_a_bits(slice_m)}
    return total, n_sat, n_fail, frozenset(found)


def _propagation(slice_m, parallelism):
    fixed = None
    if slice_m is not None:
        a = slice_a_bits(slice_m)
        fixed = {k: (a >> k) & 1 for k in range(N_A)}
    sols = enumerate_homogeneous(fixed)
    n_fail = sum(1 for x in sols if conclusion_holds(SignAssignment(x)) is None)
    total = 1 << N_BITS if slice_m is None else 1 << N_B
    return total, len(sols), n_fail, frozenset(sols)


_RUNNERS = {"naive": _naive, "reduced": _reduced, "propagation": _propagation}


def default_parallelism() -> int:
    return int(os.environ.get("AMVERIFY_SHARDS", "1"))


def verify_lemma(strategy: str = "reduced", parallelism: int | None = None, slice_m: int | None = None) -> VerificationReport:
    """Scan the admissible assignments (or one A-sign slice) with the given strategy."""
    strategy = _STRATEGY_ALIASES.get(strategy, strategy)
    if strategy not in _RUNNERS:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
    if parallelism is None:
        parallelism = default_parallelism()
    t0 = time.perf_counter()
    total, n_sat, n_fail, found = _RUNNERS[strategy](slice_m, parallelism)
    elapsed = time.perf_counter() - t0
    return VerificationReport(
        strategy=strategy,
        total_scanned=total,
        hypothesis_satisfying=n_sat,
        conclusion_failures=n_fail,
        representatives=_representatives(sorted(found)),
        wall_time=elapsed,
        slice_m=slice_m,
        satisfying=found,
    )


def cross_check(reports: list[VerificationReport]) -> None:
    """Raise :class:`StrategyDisagreement` unless all reports agree exactly."""
    base = reports[0]
    for other in reports[1:]:
        same = (
            base.hypothesis_satisfying == other.hypothesis_satisfying
            and base.conclusion_failures == other.conclusion_failures
            and base.satisfying == other.satisfying
        )
        if not same:
            diff = base.satisfying ^ other.satisfying
            witness = SignAssignment(min(diff)) if diff else None
            raise StrategyDisagreement(
                f"{base.strategy} and {other.strategy} disagree: "
                f"({base.hypothesis_satisfying}, {base.conclusion_failures}) vs "
                f"({other.hypothesis_satisfying}, {other.conclusion_failures}); "
                f"minimal disagreeing assignment {witness.describe() if witness else 'n/a'}",
                witness,
            )


# ---------------------------------------------------------------------------
# Slice-by-slice case analysis by number of positive A_i


def _b_signs(x: int) -> dict[tuple[int, int], int]:
    return {
        p: 1 if (x >> (N_A + k)) & 1 else -1 for k, p in enumerate(itertools.combinations(range(1, 8), 2))
    }


def case_m7(strategy: str = "reduced") -> dict:
    """m = 7: homogeneity forces all B_ij to share a sign, and the sign is -1."""
    rep = verify_lemma(strategy, slice_m=7)
    b_sets = [set(_b_signs(x).values()) for x in rep.satisfying]
    return {
        "hypothesis_satisfying": rep.hypothesis_satisfying,
        "all_b_equal": all(len(s) == 1 for s in b_sets),
        "b_signs": sorted({next(iter(s)) for s in b_sets if len(s) == 1}),
        "conclusion_failures": rep.conclusion_failures,
        "witness_types": sorted({r["witness_bundle"] for r in rep.representatives if r["witness_bundle"]}),
    }


def case2_assignment() -> SignAssignment:
    """A_1..A_6 = +, A_7 = -, sign(B_G) = + iff 7 in G."""
    b = {p: 1 if 7 in p else -1 for p in itertools.combinations(range(1, 8), 2)}
    return SignAssignment.from_signs([1] * 6 + [-1], b)


def case_m6(strategy: str = "reduced") -> dict:
    """m = 6: the B-pattern forced by a failing conclusion violates homogeneity on II{1,2,3}."""
    rep = verify_lemma(strategy, slice_m=6)
    s = case2_assignment()
    profile = mixed_profile(s)
    ii123 = dp2.bundle_index("II", (1, 2, 3))
    return {
        "hypothesis_satisfying": rep.hypothesis_satisfying,
        "conclusion_failures": rep.conclusion_failures,
        "forced_pattern_is_homogeneous": is_hypothesis_satisfying(s),
        "II123_profile": list(profile[ii123]),
        "II123_breaks_homogeneity": 0 < profile[ii123][0] < 6,
    }


def case_m2_to_5(strategy: str = "reduced") -> dict:
    """2 <= m <= 5: III(6,1) and III(7,2) cannot both consist of (+,+) fibers only."""
    b61 = dp2.bundle_index("III", (6, 1))
    b72 = dp2.bundle_index("III", (7, 2))
    out = {}
    for m in range(2, 6):
        rep = verify_lemma(strategy, slice_m=m)
        both_plus = 0
        pure = 0
        for x in rep.satisfying:
            prof = mixed_profile(SignAssignment(x))
            if prof[b61][0] == 0 and prof[b72][0] == 0:
                pure += 1
            if prof[b61][1] == 6 and prof[b72][1] == 6:
                both_plus += 1
        out[m] = {
            "hypothesis_satisfying": rep.hypothesis_satisfying,
            "conclusion_failures": rep.conclusion_failures,
            "III61_and_III72_pure": pure,
            "III61_and_III72_all_plus": both_plus,
        }
    return out
