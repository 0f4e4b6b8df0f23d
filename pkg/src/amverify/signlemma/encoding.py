"""Bit encoding of sign assignments on the 56 lines.

Bit ``k`` (0 <= k < 28) holds the sign of line ``k`` in canonical order, i.e.
A_1..A_7 then B_ij lexicographically; a set bit means +1.  C_ij and D_i carry
the opposite sign of their Geiser partners, so every assignment satisfies the
pairing constraints by construction.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .. import dp2

N_BITS = 28
N_A = 7
N_B = 21
FULL_MASK = (1 << N_BITS) - 1
GROUP_ORDER = 2 * math.factorial(7)


@dataclass(frozen=True)
class LineBit:
    """Where a line's sign lives: ``sign = +1`` iff ``bit(var) ^ polarity == 1``."""

    var: int
    polarity: int


@lru_cache(maxsize=None)
def line_bits() -> tuple[LineBit, ...]:
    out = []
    for k, t in enumerate(dp2.lines()):
        if k < N_BITS:
            out.append(LineBit(k, 0))
        else:
            partner = dp2.line_index(dp2.geiser(t))
            if partner >= N_BITS:
                raise dp2.ConsistencyError(f"Geiser partner of {t.name} is not an A/B line")
            out.append(LineBit(partner, 1))
    return tuple(out)


@lru_cache(maxsize=None)
def fiber_table() -> np.ndarray:
    """int32 array (126, 6, 4): per fiber (var_p, pol_p, var_q, pol_q)."""
    lb = line_bits()
    rows = []
    for rec in dp2.conic_bundles():
        fibs = []
        for x, y in rec.singular_fibers:
            p, q = lb[dp2.line_index(x)], lb[dp2.line_index(y)]
            fibs.append((p.var, p.polarity, q.var, q.polarity))
        rows.append(fibs)
    return np.array(rows, dtype=np.int32)


@lru_cache(maxsize=None)
def hypothesis_constraints() -> tuple[np.ndarray, np.ndarray]:
    """Homogeneity as xor constraints: ``parity(x & mask) == parity_bit``.

    A fiber is mixed iff the xor of its two sign bits is 1, so "fiber 0 and
    fiber k of a bundle agree on mixedness" is linear over GF(2).  Five
    constraints per bundle, in bundle order.
    """
    masks, rhs = [], []
    for fibs in fiber_table():
        v0, p0, w0, q0 = fibs[0]
        for v, p, w, q in fibs[1:]:
            masks.append((1 << v0) ^ (1 << w0) ^ (1 << v) ^ (1 << w))
            rhs.append((p0 ^ q0 ^ p ^ q) & 1)
    return np.array(masks, dtype=np.uint32), np.array(rhs, dtype=np.uint8)


# ---------------------------------------------------------------------------
# Assignments


@dataclass(frozen=True, order=True)
class SignAssignment:
    bits: int

    def __post_init__(self):
        if not 0 <= self.bits <= FULL_MASK:
            raise ValueError(f"sign assignment must fit in {N_BITS} bits")

    @classmethod
    def from_signs(cls, a_signs, b_signs=None) -> SignAssignment:
        """Build from A-signs (7 values of +-1) and B-signs (dict (i,j)->+-1, or 21 values)."""
        a_signs = list(a_signs)
        if len(a_signs) != N_A:
            raise ValueError("need 7 A-signs")
        bits = sum(1 << k for k, s in enumerate(a_signs) if _bit(s))
        if b_signs is None:
            return cls(bits)
        if isinstance(b_signs, dict):
            b_signs = [b_signs[p] for p in itertools.combinations(range(1, 8), 2)]
        b_signs = list(b_signs)
        if len(b_signs) != N_B:
            raise ValueError("need 21 B-signs")
        bits |= sum(1 << (N_A + k) for k, s in enumerate(b_signs) if _bit(s))
        return cls(bits)

    def sign(self, line) -> int:
        k = line if isinstance(line, int) else dp2.line_index(line)
        lb = line_bits()[k]
        return 1 if ((self.bits >> lb.var) & 1) ^ lb.polarity else -1

    def signs(self) -> tuple[int, ...]:
        return tuple(self.sign(k) for k in range(56))

    @property
    def m(self) -> int:
        """Number of A_i with sign +1."""
        return bin(self.bits & ((1 << N_A) - 1)).count("1")

    def flip(self) -> SignAssignment:
        return SignAssignment(self.bits ^ FULL_MASK)

    def permute(self, sigma) -> SignAssignment:
        """Relabel indices: A_i -> A_sigma(i), B_ij -> B_sigma(i)sigma(j); sigma maps 1..7 (tuple indexed from 0)."""
        return SignAssignment(permute_bits(self.bits, tuple(sigma)))

    def describe(self) -> dict:
        a = "".join("+" if (self.bits >> k) & 1 else "-" for k in range(N_A))
        b = "".join("+" if (self.bits >> (N_A + k)) & 1 else "-" for k in range(N_B))
        return {"bits": self.bits, "A": a, "B": b}


def _bit(s: int) -> int:
    if s not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {s}")
    return 1 if s == 1 else 0


@lru_cache(maxsize=None)
def _b_positions() -> dict[tuple[int, int], int]:
    return {p: N_A + k for k, p in enumerate(itertools.combinations(range(1, 8), 2))}


@lru_cache(maxsize=None)
def bit_permutation(sigma: tuple[int, ...]) -> tuple[int, ...]:
    """dest[k] = bit position that bit k moves to under the index relabelling sigma."""
    if sorted(sigma) != list(range(1, 8)):
        raise ValueError(f"not a permutation of 1..7: {sigma}")
    pos = _b_positions()
    dest = [0] * N_BITS
    for i in range(1, 8):
        dest[i - 1] = sigma[i - 1] - 1
    for (i, j), k in pos.items():
        a, b = sorted((sigma[i - 1], sigma[j - 1]))
        dest[k] = pos[(a, b)]
    return tuple(dest)


def permute_bits(bits: int, sigma: tuple[int, ...]) -> int:
    dest = bit_permutation(sigma)
    out = 0
    for k in range(N_BITS):
        if (bits >> k) & 1:
            out |= 1 << dest[k]
    return out


# ---------------------------------------------------------------------------
# Canonical forms under S7 x {+-1}


@lru_cache(maxsize=None)
def _perm_tables(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Permutations sending {1..m} onto itself (as a set), with their B-bit source maps.

    Returns (perms (P,7), src (P,21)) where image B-bit k comes from source B-bit src[p, k].
    """
    perms = []
    for head in itertools.permutations(range(1, m + 1)):
        for tail in itertools.permutations(range(m + 1, 8)):
            perms.append(head + tail)
    srcs = []
    for sigma in perms:
        dest = bit_permutation(sigma)
        src = [0] * N_B
        for k in range(N_A, N_BITS):
            src[dest[k] - N_A] = k - N_A
        srcs.append(src)
    return np.array(perms, dtype=np.int64), np.array(srcs, dtype=np.int64)


_B_WEIGHTS = np.array([1 << (N_B - 1 - k) for k in range(N_B)], dtype=np.int64)


def canonicalize(s: SignAssignment) -> tuple[SignAssignment, tuple[int, ...], bool]:
    """Orbit representative under index relabelling and global flip.

    The representative is the lexicographically least sign sequence
    (A_1..A_7, B_12..B_67) with + ordered before -.  Returns
    ``(canonical, sigma, flipped)`` with ``canonical = permute(flip?(s), sigma)``.
    Because 7 is odd, the flip is fixed by requiring at least four + among the A_i.
    """
    bits = s.bits
    flipped = bin(bits & 0x7F).count("1") < 4
    if flipped:
        bits ^= FULL_MASK
    a_plus = [i for i in range(1, 8) if (bits >> (i - 1)) & 1]
    a_minus = [i for i in range(1, 8) if not (bits >> (i - 1)) & 1]
    m = len(a_plus)
    # base relabelling: plus indices -> 1..m, minus indices -> m+1..7, order-preserving
    base = [0] * 7
    for new, old in enumerate(a_plus + a_minus, start=1):
        base[old - 1] = new
    base = tuple(base)
    b0 = permute_bits(bits, base)
    perms, srcs = _perm_tables(m)
    b_vec = np.array([(b0 >> (N_A + k)) & 1 for k in range(N_B)], dtype=np.int64)
    keys = b_vec[srcs] @ _B_WEIGHTS
    best = int(np.argmax(keys))
    tau = tuple(int(x) for x in perms[best])
    sigma = tuple(tau[base[i] - 1] for i in range(7))
    canon = SignAssignment(permute_bits(bits, sigma))
    return canon, sigma, flipped


def orbit_size(s: SignAssignment) -> int:
    """|orbit| = |S7 x {+-1}| / |stabilizer|, counted from the canonicalisation ties."""
    bits = s.bits
    if bin(bits & 0x7F).count("1") < 4:
        bits ^= FULL_MASK
    canon, _, _ = canonicalize(SignAssignment(bits))
    m = canon.m
    perms, srcs = _perm_tables(m)
    b_vec = np.array([(canon.bits >> (N_A + k)) & 1 for k in range(N_B)], dtype=np.int64)
    keys = b_vec[srcs] @ _B_WEIGHTS
    stabilizer = int(np.count_nonzero(keys == keys.max()))
    return GROUP_ORDER // stabilizer


def orbit(s: SignAssignment) -> set[int]:
    """Full orbit by brute force over all 10080 group elements (test oracle)."""
    out = set()
    for sigma in itertools.permutations(range(1, 8)):
        b = permute_bits(s.bits, sigma)
        out.add(b)
        out.add(b ^ FULL_MASK)
    return out
