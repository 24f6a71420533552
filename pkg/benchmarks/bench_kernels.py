"""Compare the numba kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is called through its public entry point with
``backend="numba"`` and ``backend="numpy"``; the first numba call (JIT
compilation, or loading the on-disk cache) is excluded.  Setting
``KUZNETSOV4_DISABLE_NUMBA=1`` removes the numba column.
"""

import argparse
import time

import numpy as np

from kuznetsov4._accel import HAS_NUMBA
from kuznetsov4.special import log_gamma
from kuznetsov4.whittaker import build_mellin_grid, mellin_transform_batch

ALPHA = np.array([0.3j, 0.1j, -0.15j, -0.25j])


def _cases():
    rng = np.random.default_rng(1)
    z = rng.uniform(-30, 30, 200_000) + 1j * rng.uniform(-80, 80, 200_000)
    s = 0.5 + rng.uniform(0, 2, (400, 3)) + 1j * rng.uniform(-4, 4, (400, 3))
    return {
        "log_gamma (2e5 points)": lambda b: log_gamma(z, backend=b),
        "Mellin batch (400 points)": lambda b: mellin_transform_batch(ALPHA, s, backend=b),
        "Mellin grid (17^3, full cube)": lambda b: build_mellin_grid(ALPHA, (1.5,) * 3, 0.5, 4.0, backend=b,
                                                                     prune=0),
    }


def _best(fn, backend, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(backend)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = ["numba", "numpy"] if HAS_NUMBA else ["numpy"]
    print(f"{'kernel':32s}" + "".join(f"{b:>12s}" for b in backends) + ("    speed-up" if HAS_NUMBA else ""))
    for name, fn in _cases().items():
        if HAS_NUMBA:
            fn("numba")  # compile or load from cache
        t = [_best(fn, b, args.repeat) for b in backends]
        line = f"{name:32s}" + "".join(f"{x:11.4f}s" for x in t)
        if HAS_NUMBA:
            line += f"    {t[1] / t[0]:8.1f}x"
        print(line)


if __name__ == "__main__":
    main()
