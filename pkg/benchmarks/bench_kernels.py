"""Time each hot kernel under both backends on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from rcf import _kernels
from rcf.grammar import battery_membership
from rcf.vfgroup import build_wp_pda, free_presentation


def best_of(fn, repeat):
    fn()  # warm-up (numba compiles here)
    ts = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        ts.append(time.perf_counter() - t)
    return min(ts)


def cycle_distances(n):
    i = np.arange(n + 1)
    d = np.abs(i[:, None] - i[None, :]) % n
    return np.minimum(d, n - d)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--max-len", type=int, default=6)
    args = ap.parse_args()

    g = build_wp_pda(free_presentation(2)).grammar
    tab = g.cnf_tables
    w = ("a", "b", "b^-1", "a^-1") * 6
    rows = tab.rows(w)
    D = cycle_distances(160)
    backends = ["numpy"] + (["numba"] if "numba" in _kernels.IMPLS else [])

    cases = {
        "cyk_table (|w|=24)": lambda b: _kernels.cyk_table(rows, tab.offs, tab.rA, tab.rC, backend=b),
        "interval_dp (n=160)": lambda b: _kernels.interval_dp(D, 3, backend=b),
    }
    print(f"{'kernel':<24}" + "".join(f"{b:>12}" for b in backends))
    for name, fn in cases.items():
        times = [best_of(lambda: fn(b), args.repeat) for b in backends]
        print(f"{name:<24}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times))

    # end to end: the battery picks the default backend
    t = time.perf_counter()
    battery_membership(g, free_presentation(2).alphabet, args.max_len)
    print(f"battery F2 ≤{args.max_len} ({_kernels.BACKEND}): {time.perf_counter() - t:.2f}s")


if __name__ == "__main__":
    main()
