"""Pure-Python simulation kernel; fallback when the compiled one is absent.

Must stay behaviorally identical to _simcore.pyx: same uniform draw
order (chunked refills from the numpy generator), same firing logic, so
both kernels produce bitwise-identical sample paths from the same seed.
"""

from math import log

import numpy as np

CHUNK = 8192


def run_cycles(thresholds, mu, n_cycles, start_state, rng):
    """Simulate n_cycles update cycles; return (inter-update times, post states).

    A cycle starts right after an update with battery level j. Arrivals
    raise the level (clipped at B); the update fires at the first instant
    the cycle age reaches the threshold of the currently occupied level,
    which is max(arrival time of that level, its threshold). Firing
    requires level >= 1, so energy causality holds by construction.
    """
    taus = tuple(float(t) for t in thresholds)
    B = len(taus)
    x_out = np.empty(n_cycles)
    s_out = np.empty(n_cycles, dtype=np.int64)
    buf = rng.random(CHUNK)
    idx = 0
    j = start_state
    for c in range(n_cycles):
        t = 0.0
        k = 0
        while True:
            L = j + k
            if L > B:
                L = B
            if L >= 1:
                cand = taus[L - 1]
                if cand < t:
                    cand = t
                if L == B:
                    x = cand
                    break
            if idx == CHUNK:
                buf = rng.random(CHUNK)
                idx = 0
            u = buf[idx]
            idx += 1
            t_next = t - log(1.0 - u) / mu
            if L >= 1 and cand < t_next:
                x = cand
                break
            t = t_next
            k += 1
        x_out[c] = x
        j = L - 1
        s_out[c] = j
    return x_out, s_out
