"""Compare the compiled and numpy rank kernels on condition-matrix sized inputs.

    python benchmarks/bench_rank.py [--sizes 56 120 220 286] [--repeat 3]
"""

import argparse
import time

import numpy as np

from postlab import exactlin
from postlab.exactlin import DEFAULT_PRIME, FMatrix


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[56, 120, 220, 286])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    kernels = ["numpy"] + (["cython"] if exactlin.KERNEL == "cython" else [])
    if len(kernels) == 1:
        print("compiled kernel not built; timing numpy only")
    print(f"{'n':>5} " + " ".join(f"{k:>10}" for k in kernels) + "   speedup")
    for n in args.sizes:
        A = FMatrix(DEFAULT_PRIME, rng.integers(0, DEFAULT_PRIME, size=(n, n), dtype=np.int64))
        res = {k: best_of(lambda k=k: exactlin.rank(A, kernel=k), args.repeat) for k in kernels}
        ranks = {r for _, r in res.values()}
        assert len(ranks) == 1, f"kernels disagree: {res}"
        cells = " ".join(f"{res[k][0] * 1e3:9.2f}ms" for k in kernels)
        speed = f"{res['numpy'][0] / res['cython'][0]:8.1f}x" if "cython" in res else ""
        print(f"{n:>5} {cells} {speed}")


if __name__ == "__main__":
    main()
