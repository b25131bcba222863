# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled simulation kernel.

Mirrors _simcore_py.run_cycles exactly: identical uniform draw order and
firing logic, so compiled and fallback kernels are bit-compatible.
"""

import numpy as np
from libc.math cimport log

DEF CHUNK = 8192


def run_cycles(thresholds, double mu, Py_ssize_t n_cycles, int start_state, object rng):
    cdef double[::1] taus = np.ascontiguousarray(thresholds, dtype=np.float64)
    cdef int B = taus.shape[0]
    x_arr = np.empty(n_cycles)
    s_arr = np.empty(n_cycles, dtype=np.int64)
    cdef double[::1] x_out = x_arr
    cdef long long[::1] s_out = s_arr
    cdef double[::1] buf = rng.random(CHUNK)
    cdef Py_ssize_t idx = 0, c
    cdef int j = start_state, k, L
    cdef double t, cand, t_next, u, x
    for c in range(n_cycles):
        t = 0.0
        k = 0
        cand = 0.0
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
    return x_arr, s_arr
