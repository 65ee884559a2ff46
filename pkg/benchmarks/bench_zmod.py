"""Compare the compiled and numpy Howell reductions.

    python benchmarks/bench_zmod.py [--sizes 20,60,120] [--repeat 5]

Random matrices over Z/2^N with a share of even entries, so pivots of
positive valuation and annihilator rows both occur.  Both backends must
span the same subgroup with the same pivot pattern.
"""

import argparse
import time

import numpy as np

from tmfdual import zmod


def random_matrix(rng, rows, cols, N):
    m = rng.integers(0, 1 << N, size=(rows, cols), dtype=np.uint64)
    m[rng.random((rows, cols)) < 0.4] &= np.uint64(((1 << N) - 1) ^ 1)
    return m


def timed(fn, mat, npiv, N, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(mat, npiv, N)
        best = min(best, time.perf_counter() - t0)
    return best, out


def same(a, b, n, N):
    """Same pivot pattern and the same row span (rows themselves may differ)."""
    if list(a[1]) != list(b[1]) or list(a[2]) != list(b[2]):
        return False
    ha = zmod.Subgroup(a[0], a[1], a[2], n, N)
    hb = zmod.Subgroup(b[0], b[1], b[2], n, N)
    return ha.contains_subgroup(hb) and hb.contains_subgroup(ha)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="20,60,120")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("-N", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"compiled backend available: {zmod.BACKEND == 'cython'}")
    print(f"{'size':>6} {'numpy ms':>10} {'compiled ms':>12} {'speedup':>8}  agree")
    for n in (int(x) for x in args.sizes.split(",")):
        mat = random_matrix(rng, n, n, args.N)
        t_py, out_py = timed(zmod.howell_reduce_py, mat, n, args.N, args.repeat)
        if zmod.BACKEND != "cython":
            print(f"{n:>6} {t_py * 1e3:>10.2f} {'-':>12} {'-':>8}  -")
            continue
        t_c, out_c = timed(zmod.howell_reduce, mat, n, args.N, args.repeat)
        print(f"{n:>6} {t_py * 1e3:>10.2f} {t_c * 1e3:>12.2f} {t_py / t_c:>8.1f}  {same(out_py, out_c, n, args.N)}")


if __name__ == "__main__":
    main()
