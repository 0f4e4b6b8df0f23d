"""Direct enumeration of homogeneous sign assignments by DFS with unit propagation."""

from __future__ import annotations

from .encoding import N_BITS, hypothesis_constraints


def _constraints():
    masks, rhs = hypothesis_constraints()
    out = []
    seen = set()
    for mask, r in zip(masks.tolist(), rhs.tolist()):
        if mask == 0:
            if r:
                return None  # 0 = 1: nothing satisfies
            continue
        if (mask, r) in seen:
            continue
        seen.add((mask, r))
        out.append((tuple(k for k in range(N_BITS) if (mask >> k) & 1), r))
    return out


def enumerate_homogeneous(fixed: dict[int, int] | None = None) -> list[int]:
    """All bit patterns satisfying the homogeneity constraints, sorted.

    ``fixed`` pins some bits (bit index -> 0/1) before the search starts.
    """
    cons = _constraints()
    if cons is None:
        return []
    watch: list[list[int]] = [[] for _ in range(N_BITS)]
    for c, (vs, _) in enumerate(cons):
        for v in vs:
            watch[v].append(c)

    value = [-1] * N_BITS
    trail: list[int] = []

    def assign(v: int, b: int) -> bool:
        queue = [(v, b)]
        while queue:
            v, b = queue.pop()
            if value[v] != -1:
                if value[v] != b:
                    return False
                continue
            value[v] = b
            trail.append(v)
            for c in watch[v]:
                vs, r = cons[c]
                free = None
                n_free = 0
                parity = r
                for u in vs:
                    if value[u] == -1:
                        n_free += 1
                        free = u
                    else:
                        parity ^= value[u]
                if n_free == 0 and parity:
                    return False
                if n_free == 1:
                    queue.append((free, parity))
        return True

    def undo(mark: int) -> None:
        while len(trail) > mark:
            value[trail.pop()] = -1

    for v, b in (fixed or {}).items():
        if not assign(v, b):
            return []

    solutions: list[int] = []

    def dfs() -> None:
        try:
            v = value.index(-1)
        except ValueError:
            solutions.append(sum(1 << k for k in range(N_BITS) if value[k]))
            return
        for b in (0, 1):
            mark = len(trail)
            if assign(v, b):
                dfs()
            undo(mark)

    dfs()
    return sorted(solutions)
