"""Compare the compiled scan kernel with the numpy fallback.

    python benchmarks/bench_scan.py [--shards 4] [--repeat 3]

Each kernel scans the first N A-bit shards (2^21 assignments each) under the
full homogeneity constraint set; the results must agree exactly.
"""

import argparse
import json
import time

from amverify.signlemma import kernels
from amverify.signlemma.encoding import N_A, N_B, fiber_table, hypothesis_constraints


def time_kernel(fn, shards, repeat):
    masks, rhs = hypothesis_constraints()
    fibers = fiber_table()
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = [fn(masks, rhs, fibers, a, N_A, 1 << N_B, 1 << 16) for a in range(shards)]
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--shards", type=int, default=8)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rows = {}
    t_np, r_np = time_kernel(kernels.fallback_scan_block, args.shards, args.repeat)
    rows["numpy"] = t_np
    if kernels.compiled_scan_block is not None:
        t_c, r_c = time_kernel(kernels.compiled_scan_block, args.shards, args.repeat)
        if r_c != r_np:
            raise SystemExit("kernels disagree")
        rows["compiled"] = t_c
    per_shard = {k: v / args.shards for k, v in rows.items()}
    print(json.dumps({
        "shards": args.shards,
        "assignments": args.shards << N_B,
        "seconds": {k: round(v, 4) for k, v in rows.items()},
        "projected_full_scan_s": {k: round(v * (1 << N_A), 2) for k, v in per_shard.items()},
        "speedup": round(rows["numpy"] / rows["compiled"], 1) if "compiled" in rows else None,
    }, indent=2))


if __name__ == "__main__":
    main()
