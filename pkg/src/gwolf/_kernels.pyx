# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled counter-based RNG kernels (hot path).

Same contract as ``_kernels_py``; see that module and :mod:`gwolf.rng` for
the stream layout. Outputs must stay bit-identical with the fallback, which
is why the build disables FP contraction and every floating expression below
mirrors the numpy version operation for operation.
"""

from libc.math cimport fabs
from libc.stdint cimport uint32_t, uint64_t

import numpy as np

cdef double _INV53 = 1.0 / 9007199254740992.0  # 2**-53


cdef inline void _block(uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3,
                        uint32_t k0, uint32_t k1, uint32_t* w) noexcept nogil:
    cdef uint64_t p0, p1
    cdef uint32_t x0 = c0, x1 = c1, x2 = c2, x3 = c3
    cdef int r
    for r in range(10):
        if r:
            k0 = k0 + 0x9E3779B9u
            k1 = k1 + 0xBB67AE85u
        p0 = (<uint64_t>0xD2511F53u) * x0
        p1 = (<uint64_t>0xCD9E8D57u) * x2
        x0 = (<uint32_t>(p1 >> 32)) ^ x1 ^ k0
        x1 = <uint32_t>p1
        x2 = (<uint32_t>(p0 >> 32)) ^ x3 ^ k1
        x3 = <uint32_t>p0
    w[0] = x0
    w[1] = x1
    w[2] = x2
    w[3] = x3


cdef inline double _dlo(uint32_t* w) noexcept nogil:
    return <double>((((<uint64_t>w[0]) << 32) | w[1]) >> 11) * _INV53


cdef inline double _dhi(uint32_t* w) noexcept nogil:
    return <double>((((<uint64_t>w[2]) << 32) | w[3]) >> 11) * _INV53


def philox4x32(counters, k0, k1):
    """Apply ten Philox4x32 rounds to each counter row."""
    cdef uint32_t[:, ::1] c = np.ascontiguousarray(counters, dtype=np.uint32)
    out_arr = np.empty((c.shape[0], 4), dtype=np.uint32)
    cdef uint32_t[:, ::1] out = out_arr
    cdef uint32_t key0 = <uint32_t>(int(k0) & 0xFFFFFFFF)
    cdef uint32_t key1 = <uint32_t>(int(k1) & 0xFFFFFFFF)
    cdef Py_ssize_t i, n = c.shape[0]
    cdef uint32_t w[4]
    with nogil:
        for i in range(n):
            _block(c[i, 0], c[i, 1], c[i, 2], c[i, 3], key0, key1, w)
            out[i, 0] = w[0]
            out[i, 1] = w[1]
            out[i, 2] = w[2]
            out[i, 3] = w[3]
    return out_arr


def stagnation_chain(double p1, double p2, double p3, a_sched,
                     double init_lo, double init_hi, Py_ssize_t n_trials,
                     trial0, c1word, k0, k1):
    """Evolve the stagnation recursion; see the fallback for the layout."""
    cdef double[::1] a = np.ascontiguousarray(a_sched, dtype=np.float64)
    cdef Py_ssize_t steps = a.shape[0]
    out_arr = np.empty((steps + 1, n_trials), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef uint32_t word = <uint32_t>(int(c1word) & 0xFFFFFFFF)
    cdef uint32_t unit0 = <uint32_t>(int(trial0) & 0xFFFFFFFF)
    cdef uint32_t key0 = <uint32_t>(int(k0) & 0xFFFFFFFF)
    cdef uint32_t key1 = <uint32_t>(int(k1) & 0xFFFFFFFF)
    cdef Py_ssize_t i, t
    cdef uint32_t unit, base
    cdef uint32_t w[4]
    cdef double x, at, a1, c1, y1, a2, c2, y2, a3, c3, y3
    with nogil:
        for i in range(n_trials):
            unit = unit0 + <uint32_t>i
            _block(0, word, unit, 0, key0, key1, w)
            x = init_lo + (init_hi - init_lo) * _dlo(w)
            out[0, i] = x
            for t in range(1, steps + 1):
                at = a[t - 1]
                base = <uint32_t>(3 * (t - 1) + 1)
                _block(base, word, unit, 0, key0, key1, w)
                a1 = at * (2.0 * _dlo(w) - 1.0)
                c1 = 2.0 * _dhi(w)
                y1 = p1 + a1 * fabs(c1 * p1 - x)
                _block(base + 1, word, unit, 0, key0, key1, w)
                a2 = at * (2.0 * _dlo(w) - 1.0)
                c2 = 2.0 * _dhi(w)
                y2 = p2 + a2 * fabs(c2 * p2 - x)
                _block(base + 2, word, unit, 0, key0, key1, w)
                a3 = at * (2.0 * _dlo(w) - 1.0)
                c3 = 2.0 * _dhi(w)
                y3 = p3 + a3 * fabs(c3 * p3 - x)
                x = ((y1 + y2) + y3) / 3.0
                out[t, i] = x
    return out_arr
