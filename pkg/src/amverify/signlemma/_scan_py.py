"""numpy implementation of the block scan, used when the compiled module is absent."""

from __future__ import annotations

import numpy as np

_CHUNK = 1 << 20


def _witnesses(xs: np.ndarray, fibers: np.ndarray) -> np.ndarray:
    """First bundle with both a (+,+) and a (-,-) fiber, per assignment; -1 if none."""
    x = xs[:, None, None]
    sp = ((x >> fibers[None, :, :, 0]) & 1) ^ fibers[None, :, :, 1]
    sq = ((x >> fibers[None, :, :, 2]) & 1) ^ fibers[None, :, :, 3]
    has_pp = ((sp & sq) == 1).any(axis=2)
    has_mm = ((sp | sq) == 0).any(axis=2)
    both = has_pp & has_mm
    return np.where(both.any(axis=1), both.argmax(axis=1), -1)


def scan_block(masks, rhs, fibers, fixed, shift, count, limit):
    """Same contract as the compiled ``scan_block``."""
    masks = np.asarray(masks, dtype=np.uint32)
    rhs = np.asarray(rhs, dtype=np.uint8)
    fibers = np.asarray(fibers, dtype=np.int64)
    n_sat = n_fail = 0
    found: list[tuple[int, int]] = []
    for start in range(0, count, _CHUNK):
        h = np.arange(start, min(start + _CHUNK, count), dtype=np.uint64)
        x = (np.uint64(fixed) | (h << np.uint64(shift))).astype(np.uint32)
        # filter survivors constraint by constraint; most die within a few rounds
        for mask, r in zip(masks, rhs):
            x = x[(np.bitwise_count(x & mask) & 1) == r]
            if x.size == 0:
                break
        if x.size == 0:
            continue
        w = _witnesses(x.astype(np.int64), fibers)
        n_sat += int(x.size)
        n_fail += int((w < 0).sum())
        room = limit - len(found)
        if room > 0:
            found.extend((int(a), int(b)) for a, b in zip(x[:room], w[:room]))
    return n_sat, n_fail, found
