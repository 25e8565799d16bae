"""Benchmark the compiled kernels against the pure-Python twins.

The four hot scans dominate runtime once carriers or variable counts
grow: shortest-path closure, the metric axiom sweep, valuation
enumeration for satisfaction, and the non-expansiveness pair scan.
This script times both backends on the same inputs and checks that the
results agree.

Run:  python3 benchmarks/bench_backends.py [--json out.json]
"""

from __future__ import annotations

import argparse
import json
import random
import time
from array import array

from metalg import _kernels
from metalg._kernels import _pykern

BIG = 1 << 61


def timed(fn, *args, repeat=3):
    best = None
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best, result


def bench_closure(rng):
    n = 130
    d = [0] * (n * n)
    for i in range(n):
        for j in range(i + 1, n):
            w = rng.randint(1, 10 ** 6)
            d[i * n + j] = d[j * n + i] = w
    return "closure n=130", (n, d), "metric_closure"


def bench_axioms(rng):
    n = 130
    d = [0] * (n * n)
    for i in range(n):
        for j in range(i + 1, n):
            w = rng.randint(10 ** 5, 2 * 10 ** 5)  # triangle-safe band
            d[i * n + j] = d[j * n + i] = w
    return "axiom scan n=130", (n, d), "metric_violation"


def bench_eval_scan(rng):
    n = 4
    nv = 9  # 262144 valuations
    arity = [1, 2]
    offset = [0, n]
    tables = [rng.randrange(n) for _ in range(n + n * n)]
    drank = [0 if i == j else rng.randint(1, 5) for i in range(n) for j in range(n)]
    prog_l = [0, nv, 1, nv + 1, 2, nv + 1, 3, nv + 1, 4, nv + 1]
    prog_r = [5, 6, nv + 1, 7, nv + 1, 8, nv + 1]
    return ("satisfaction scan 4^9 valuations",
            (nv, n, prog_l, prog_r, arity, offset, tables, drank, -1),
            "eval_scan")


def bench_nonexpansive(rng):
    n = 28
    k = 2
    # a projection table is non-expansive, so the scan runs to the end
    table = [i % n for i in range(n * n)]
    drank = [0 if i == j else 1 for i in range(n) for j in range(n)]
    return ("non-expansiveness scan 28^4 pairs",
            (k, n, table, drank),
            "nonexpansive_scan")


def bench_pairwise(rng):
    n = 4
    m = 220
    nvals = 256
    values = [rng.randrange(n) for _ in range(m * nvals)]
    drank = [0 if i == j else rng.randint(1, 4) for i in range(n) for j in range(n)]
    return ("pairwise sup 220 vectors x 256 valuations",
            (m, nvals, values, drank, n),
            "pairwise_sup")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--json", metavar="PATH")
    args = parser.parse_args()
    if _kernels.compiled is None:
        print("compiled kernel unavailable; nothing to compare "
              "(reinstall with a C compiler present)")
        return
    rng = random.Random(2024)
    rows = []
    for build in (bench_closure, bench_axioms, bench_eval_scan,
                  bench_nonexpansive, bench_pairwise):
        label, raw_args, fname = build(rng)
        c_args = [array("q", a) if isinstance(a, list) else a for a in raw_args]
        t_pure, r_pure = timed(getattr(_pykern, fname), *raw_args)
        t_c, r_c = timed(getattr(_kernels.compiled, fname), *c_args)
        assert r_pure == r_c, f"backend results differ for {label}"
        rows.append((label, t_pure, t_c, t_pure / t_c))
    width = max(len(r[0]) for r in rows)
    print(f"{'scan':<{width}}  {'pure':>10}  {'compiled':>10}  {'speedup':>8}")
    for label, tp, tc, sp in rows:
        print(f"{label:<{width}}  {tp * 1e3:>8.1f}ms  {tc * 1e3:>8.1f}ms  {sp:>7.1f}x")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump([{"scan": label, "pure_s": tp, "compiled_s": tc,
                        "speedup": sp} for label, tp, tc, sp in rows],
                      fh, indent=2)
            fh.write("\n")


if __name__ == "__main__":
    main()
