"""Compare the compiled simulation kernel against the pure-Python fallback.

Run as a script:  python benchmarks/bench_simcore.py [n_cycles]

Both kernels draw from the same chunked PCG64 stream, so their outputs are
bit-identical; the benchmark verifies that before timing.
"""

import sys
import time

import numpy as np

from aoiharvest import _simcore_py
from aoiharvest.simulator import KERNEL, _kernel

THRESHOLDS = np.array([1.5, 1.2, 0.86, 0.604])
MU = 1.0


def timed(kernel, n):
    rng = np.random.Generator(np.random.PCG64(2024))
    t0 = time.perf_counter()
    x, s = kernel.run_cycles(THRESHOLDS, MU, n, 0, rng)
    return time.perf_counter() - t0, x, s


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 1_000_000
    t_py, x_py, s_py = timed(_simcore_py, n)
    if KERNEL == "python":
        print(f"compiled kernel unavailable; pure python: {n} cycles in {t_py:.3f} s")
        return
    t_cy, x_cy, s_cy = timed(_kernel, n)
    assert np.array_equal(x_py, x_cy) and np.array_equal(s_py, s_cy), "kernel outputs differ"
    print(f"cycles          : {n}")
    print(f"pure python     : {t_py:.3f} s  ({n / t_py:,.0f} cycles/s)")
    print(f"compiled (cython): {t_cy:.3f} s  ({n / t_cy:,.0f} cycles/s)")
    print(f"speedup         : {t_py / t_cy:.1f}x  (outputs bit-identical)")


if __name__ == "__main__":
    main()
