"""Numba vs numpy timings for the three hot kernels.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each kernel is run once per backend before timing (numba compiles on first
call) and the outputs of the two backends are compared.
"""

import argparse
import time

import numpy as np

from lslab import use_numba
from lslab.linalg import symmetric_eigs
from lslab.rng import SplitMix64
from lslab.specfun import alf_table, legendre_series


def _cases():
    rng = SplitMix64(7)
    theta = np.arccos(2.0 * rng.uniform(2000) - 1.0)
    coef = rng.normal(513)
    x = 2.0 * rng.uniform(100_000) - 1.0
    A = rng.normal(120 * 120).reshape(120, 120)
    S = A + A.T
    return {
        "alf_table(nmax=256, 2000 colatitudes)": lambda: alf_table(256, theta),
        "legendre_series(512 terms, 1e5 points)": lambda: legendre_series(coef, x),
        "symmetric_eigs(120 x 120)": lambda: symmetric_eigs(S)[0],
    }


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    prev = use_numba(True)
    try:
        print(f"{'kernel':42s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s} {'max diff':>10s}")
        for name, fn in _cases().items():
            use_numba(True)
            fn()  # compile
            t_nb, out_nb = _time(fn, args.repeat)
            use_numba(False)
            t_np, out_np = _time(fn, args.repeat)
            diff = float(np.max(np.abs(np.asarray(out_nb) - np.asarray(out_np))))
            print(f"{name:42s} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:8.1f} {diff:10.2e}")
    finally:
        use_numba(prev)


if __name__ == "__main__":
    main()
