"""Pure-numpy counter-based RNG kernels (fallback backend).

Implements the Philox4x32-10 block function of Salmon et al. (2011),
vectorized over counter rows, plus the fused stagnation recursion driven by
it. ``_kernels.pyx`` provides a compiled implementation of the same two
functions; the outputs must be bit-identical, so any change to an arithmetic
expression here has to be mirrored there (including operation order -- the
extension is compiled with FP contraction off for this reason).

Stream layout and double conversion are documented in :mod:`gwolf.rng`.
"""

import numpy as np

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = 0x9E3779B9
_W1 = 0xBB67AE85
_MASK32 = 0xFFFFFFFF
_U32 = np.uint64(32)
_U11 = np.uint64(11)
_INV53 = 2.0**-53


def philox4x32(counters, k0, k1):
    """Apply ten Philox4x32 rounds to each counter row.

    Parameters
    ----------
    counters : uint32 array of shape (n, 4)
    k0, k1 : 32-bit key words (the master seed)

    Returns
    -------
    uint32 array of shape (n, 4) with the output words of each block.
    """
    c = np.asarray(counters, dtype=np.uint32)
    x0 = c[:, 0].astype(np.uint64)
    x1 = c[:, 1].astype(np.uint64)
    x2 = c[:, 2].astype(np.uint64)
    x3 = c[:, 3].astype(np.uint64)
    k0 = int(k0) & _MASK32
    k1 = int(k1) & _MASK32
    mask = np.uint64(_MASK32)
    for r in range(10):
        if r:
            k0 = (k0 + _W0) & _MASK32
            k1 = (k1 + _W1) & _MASK32
        # products fit in 64 bits: both factors are below 2**32
        p0 = _M0 * x0
        p1 = _M1 * x2
        x0 = (p1 >> _U32) ^ x1 ^ np.uint64(k0)
        x1 = p1 & mask
        x2 = (p0 >> _U32) ^ x3 ^ np.uint64(k1)
        x3 = p0 & mask
    out = np.empty((c.shape[0], 4), dtype=np.uint32)
    out[:, 0] = x0
    out[:, 1] = x1
    out[:, 2] = x2
    out[:, 3] = x3
    return out


def _pairs(words):
    """Two doubles in [0, 1) per block: 53 high bits of each u32 pair."""
    w = words.astype(np.uint64)
    d0 = (((w[:, 0] << _U32) | w[:, 1]) >> _U11) * _INV53
    d1 = (((w[:, 2] << _U32) | w[:, 3]) >> _U11) * _INV53
    return d0, d1


def stagnation_chain(p1, p2, p3, a_sched, init_lo, init_hi, n_trials, trial0,
                     c1word, k0, k1):
    """Evolve the stagnation recursion for a contiguous range of trials.

    Each trial owns the stream (c1word, trial0 + i, 0): block 0 seeds the
    initial uniform position, and step t consumes blocks 3(t-1)+1 .. 3(t-1)+3
    as (A, C) pairs for the three leaders.

    Returns a (T, n_trials) matrix of positions, where row 0 is the initial
    population and ``a_sched`` holds a(t) for t = 1 .. T-1.
    """
    a_sched = np.asarray(a_sched, dtype=np.float64)
    steps = a_sched.shape[0]
    out = np.empty((steps + 1, n_trials), dtype=np.float64)

    units = (np.uint32(trial0) + np.arange(n_trials, dtype=np.uint32))
    ctr = np.zeros((n_trials, 4), dtype=np.uint32)
    ctr[:, 1] = np.uint32(c1word)
    ctr[:, 2] = units
    d0, _ = _pairs(philox4x32(ctr, k0, k1))
    x = init_lo + (init_hi - init_lo) * d0
    out[0] = x

    step_ctr = np.zeros((3 * n_trials, 4), dtype=np.uint32)
    step_ctr[:, 1] = np.uint32(c1word)
    step_ctr[:, 2] = np.tile(units, 3)
    for t in range(1, steps + 1):
        base = 3 * (t - 1) + 1
        step_ctr[:, 0] = np.repeat(np.arange(base, base + 3, dtype=np.uint32),
                                   n_trials)
        da, dc = _pairs(philox4x32(step_ctr, k0, k1))
        da = da.reshape(3, n_trials)
        dc = dc.reshape(3, n_trials)
        a = a_sched[t - 1]
        a1 = a * (2.0 * da[0] - 1.0)
        c1 = 2.0 * dc[0]
        y1 = p1 + a1 * np.abs(c1 * p1 - x)
        a2 = a * (2.0 * da[1] - 1.0)
        c2 = 2.0 * dc[1]
        y2 = p2 + a2 * np.abs(c2 * p2 - x)
        a3 = a * (2.0 * da[2] - 1.0)
        c3 = 2.0 * dc[2]
        y3 = p3 + a3 * np.abs(c3 * p3 - x)
        x = ((y1 + y2) + y3) / 3.0
        out[t] = x
    return out
