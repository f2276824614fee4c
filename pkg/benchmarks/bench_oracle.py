"""Time the lattice-sum kernel on the numba and numpy paths.

    python benchmarks/bench_oracle.py [--n 801] [--half 100] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from ellrecip import _accel


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=801)
    ap.add_argument("--half", type=int, default=100)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(1)
    w = rng.uniform(-400, 400, args.n) + 1j * rng.uniform(0.1, 80, args.n)
    paths = {"numpy": _accel.window_sums_numpy}
    if _accel.HAVE_NUMBA:
        _accel.window_sums_numba(w[:2], 2, 2)  # compile outside the timer
        paths["numba"] = _accel.window_sums_numba
    for name, fn in paths.items():
        for k in (1, 4):
            t = min(timeit.repeat(lambda: fn(w, k, args.half), number=1, repeat=args.repeat))
            print(f"{name:6s} k={k} n={args.n} half={args.half}: {t * 1e3:8.2f} ms")


if __name__ == "__main__":
    main()
