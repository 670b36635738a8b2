"""Compiled versus pure-Python kernels on the operations that dominate runtime.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from pnfgame import _kernels_py
from pnfgame.topology import random as random_graph

try:
    from pnfgame import _kernels
except ImportError:  # extension not built
    _kernels = None

RHO, BETA, C = 0.8, 1.0, 0.1
TOL, DOUBLINGS, ITERS = 1e-10, 200, 200


def cases(n):
    rng = np.random.default_rng(0)
    pows = rng.uniform(0.5, 9.0, n - 1) ** RHO
    gbar = random_graph(n, 0.2, 1)
    gbar = np.ascontiguousarray(np.maximum(gbar, gbar.T), dtype=np.uint8)
    order = np.arange(n, dtype=np.int64)
    return {
        "best_production": lambda k: k.best_production(3.0, C, RHO, BETA, TOL, DOUBLINGS, ITERS),
        f"scan_links(m={n - 1})": lambda k: k.scan_links(2.0, pows, C, 0.3, RHO, BETA, TOL, DOUBLINGS, ITERS),
        f"production_sweep(n={n})": lambda k: k.production_sweep(
            np.full(n, 9.0), gbar, order, C, RHO, BETA, 0.5, TOL, DOUBLINGS, ITERS),
    }


def time_call(fn, repeat):
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, default=80)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not available; only the fallback can be timed")
    print(f"{'kernel':<28}{'python (us)':>14}{'cython (us)':>14}{'speedup':>10}")
    for name, call in cases(args.n).items():
        t_py = time_call(lambda: call(_kernels_py), args.repeat)
        if _kernels is None:
            print(f"{name:<28}{t_py * 1e6:>14.1f}{'-':>14}{'-':>10}")
            continue
        t_cy = time_call(lambda: call(_kernels), args.repeat)
        print(f"{name:<28}{t_py * 1e6:>14.1f}{t_cy * 1e6:>14.1f}{t_py / t_cy:>9.1f}x")


if __name__ == "__main__":
    main()
