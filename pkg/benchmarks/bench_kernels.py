"""Compare the compiled and numpy batch kernels.

Usage::

    python3 benchmarks/bench_kernels.py [--sizes 1000,100000] [--repeat 5]

Prints the best-of-``repeat`` wall time of ``aux_batch`` and ``metric_batch``
for each backend and the speed-up of the compiled one.
"""
import argparse
import timeit

import numpy as np

from quartic_finsler import _kernels_py, catalog

try:
    from quartic_finsler import _ckernels
except ImportError:
    _ckernels = None


def _inputs(name, size, seed=0):
    M = catalog.preset_quartic(name)
    V = np.random.default_rng(seed).normal(size=(size, M.dim))
    return M, V


def bench(name, size, repeat):
    M, V = _inputs(name, size)
    dense = M.dense
    rows = []
    backends = [("python", _kernels_py)] + ([("cython", _ckernels)] if _ckernels else [])
    for label, mod in backends:
        Q, N, K = mod.aux_batch(dense, V)
        sign = np.sign(Q)
        t_aux = min(timeit.repeat(lambda: mod.aux_batch(dense, V), number=1, repeat=repeat))
        t_met = min(timeit.repeat(lambda: mod.metric_batch(Q, N, K, sign), number=1, repeat=repeat))
        rows.append((label, t_aux, t_met))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="1000,100000")
    ap.add_argument("--presets", default="power_sum,vacuum")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled extension not built; timing the numpy kernels only")
    print(f"{'preset':<10} {'n':>8} {'backend':<7} {'aux_batch':>11} {'metric_batch':>13}")
    for name in args.presets.split(","):
        for size in (int(s) for s in args.sizes.split(",")):
            rows = bench(name, size, args.repeat)
            for label, t_aux, t_met in rows:
                print(f"{name:<10} {size:>8} {label:<7} {t_aux * 1e3:>9.2f}ms {t_met * 1e3:>11.2f}ms")
            if len(rows) == 2:
                (_, pa, pm), (_, ca, cm) = rows
                print(f"{'':<10} {'':>8} {'speedup':<7} {pa / ca:>10.1f}x {pm / cm:>12.1f}x")


if __name__ == "__main__":
    main()
