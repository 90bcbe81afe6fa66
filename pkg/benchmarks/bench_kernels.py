"""Compare the numba and pure-numpy kernels.

    python3 benchmarks/bench_kernels.py [--repeat 7] [--skip-fit]

Kernel timings run both implementations in this process.  The end-to-end
fit timing starts one subprocess per backend so PROCSPC_DISABLE_NUMBA takes
effect at import time.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from procspc import _kernels

FIT_SNIPPET = """
import timeit
import numpy as np
from procspc import BACKEND
from procspc.core import ChartSeries, ControlLimits
from procspc.forecaster import fit
rng = np.random.default_rng(0)
ds = np.sort(rng.choice(np.arange(0, 800 * 86400, 60), {n}, replace=False)) + 1_743_465_600
y = 100 + np.sin(2 * np.pi * (ds - ds[0]) / 86400 / 7) + rng.normal(0, 1, {n})
s = ChartSeries("B", "G", ControlLimits(80, 90, 100, 110, 120), ds, y)
fit(s)
print(BACKEND, min(timeit.repeat(lambda: fit(s), number=1, repeat={repeat})))
"""


def best_of(fn, repeat):
    fn()  # compile / warm caches
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def design_inputs(n):
    rng = np.random.default_rng(n)
    t = np.sort(rng.uniform(0, 1, n))
    t_days = t * 800.0
    changepoints = np.linspace(0, 0.8, 26)[1:]
    periods = np.array([7.0, 365.25])
    orders = np.array([3, 10], dtype=np.int64)
    return t, t_days, changepoints, periods, orders


def bench_kernels(sizes, repeat):
    print(f"{'kernel':<16}{'n':>10}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for n in sizes:
        args = design_inputs(n)
        a = best_of(lambda: _kernels.design_matrix_numpy(*args), repeat)
        b = best_of(lambda: _kernels.design_matrix_numba(*args), repeat)
        print(f"{'design_matrix':<16}{n:>10}{a * 1e3:>12.3f}{b * 1e3:>12.3f}{a / b:>10.1f}")
    for n in sizes:
        values = np.random.default_rng(n).normal(100, 15, n * 20)
        lim = (70.0, 85.0, 115.0, 130.0)
        a = best_of(lambda: _kernels.classify_codes_numpy(values, *lim), repeat)
        b = best_of(lambda: _kernels.classify_codes_numba(values, *lim), repeat)
        print(f"{'classify_codes':<16}{n * 20:>10}{a * 1e3:>12.3f}{b * 1e3:>12.3f}{a / b:>10.1f}")


def bench_fit(n, repeat):
    code = FIT_SNIPPET.format(n=n, repeat=repeat)
    for disable in ("1", "0"):
        env = dict(os.environ, PROCSPC_DISABLE_NUMBA=disable)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        backend, seconds = out.stdout.split()
        print(f"fit n={n:<6} backend={backend:<6} {float(seconds) * 1e3:8.2f} ms")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=7)
    parser.add_argument("--sizes", type=int, nargs="+", default=[500, 5000, 50000])
    parser.add_argument("--fit-points", type=int, default=5000)
    parser.add_argument("--skip-fit", action="store_true")
    args = parser.parse_args()
    if not _kernels.HAVE_NUMBA:
        sys.exit("numba is not installed; nothing to compare")
    bench_kernels(args.sizes, args.repeat)
    if not args.skip_fit:
        bench_fit(args.fit_points, args.repeat)


if __name__ == "__main__":
    main()
