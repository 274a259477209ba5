"""Deterministic stream addressing on top of the Philox4x32-10 block function.

Every random draw in the package comes from a counter-based stream addressed
by (master seed, purpose, dimension, unit, iteration):

* key words          -- the 64-bit master seed, split into two 32-bit halves
* counter word 0     -- block index within the stream
* counter word 1     -- ``purpose << 24 | dimension``
* counter word 2     -- unit index (agent, trial, or sample)
* counter word 3     -- iteration (0 when not applicable)

Each block yields two doubles in [0, 1): the 53 high bits of (w0, w1) and of
(w2, w3). Because streams are addressed rather than consumed in program
order, any parallel execution schedule reproduces the same numbers.

Draw-order contract for one position update (unit = agent, word 3 = t):
dimensions ascending, leaders k = 1..3 within a dimension, A before C.
Flat draw number ``6*j + 2*(k-1)`` is A and ``6*j + 2*(k-1) + 1`` is C,
i.e. block ``3*j + (k-1)`` holds the (A, C) pair for dimension j, leader k.
"""

import numpy as np

from . import backend

PURPOSE_INIT = 1
PURPOSE_UPDATE = 2
PURPOSE_LEADER_STEP = 3
PURPOSE_UPDATE_CONSTANT = 4
PURPOSE_STAGNATION = 5

_MAX_DIM = 1 << 24


def split_seed(seed):
    """Split a 64-bit master seed into the two Philox key words."""
    seed = int(seed)
    if not 0 <= seed < 1 << 64:
        raise ValueError(f"seed must be an integer in [0, 2**64), got {seed}")
    return seed & 0xFFFFFFFF, seed >> 32


def purpose_word(purpose, dim=0):
    """Pack the purpose tag and dimension index into counter word 1."""
    if not 0 <= dim < _MAX_DIM:
        raise ValueError(f"dimension index out of range: {dim}")
    return (purpose << 24) | dim


def uniform_pairs(seed, word1, units, iterations, blocks):
    """Evaluate one block per row and return its two doubles.

    ``units``, ``iterations`` and ``blocks`` broadcast against each other;
    the result is a pair of float64 arrays of the broadcast shape.
    """
    units, iterations, blocks = np.broadcast_arrays(
        np.asarray(units), np.asarray(iterations), np.asarray(blocks))
    shape = units.shape
    n = units.size
    ctr = np.empty((n, 4), dtype=np.uint32)
    ctr[:, 0] = blocks.reshape(n)
    ctr[:, 1] = word1
    ctr[:, 2] = units.reshape(n)
    ctr[:, 3] = iterations.reshape(n)
    k0, k1 = split_seed(seed)
    w = np.asarray(backend.philox4x32(ctr, k0, k1)).astype(np.uint64)
    d0 = (((w[:, 0] << np.uint64(32)) | w[:, 1]) >> np.uint64(11)) * 2.0**-53
    d1 = (((w[:, 2] << np.uint64(32)) | w[:, 3]) >> np.uint64(11)) * 2.0**-53
    return d0.reshape(shape), d1.reshape(shape)


class Stream:
    """Sequential view of one keyed stream.

    Yields the stream's doubles in block order (two per block); used where an
    operation consumes a variable number of draws one call at a time. The
    cursor advances with each call, so a fresh Stream replays from block 0.
    """

    def __init__(self, seed, purpose, unit, iteration=0, dim=0):
        self._seed = int(seed)
        self._word1 = purpose_word(purpose, dim)
        self._unit = int(unit)
        self._iteration = int(iteration)
        self._block = 0
        self._leftover = None

    def uniforms(self, count):
        """Return the next ``count`` doubles of the stream."""
        if count < 0:
            raise ValueError("count must be nonnegative")
        out = np.empty(count, dtype=np.float64)
        pos = 0
        if self._leftover is not None and count > 0:
            out[0] = self._leftover
            self._leftover = None
            pos = 1
        need = count - pos
        if need > 0:
            nblocks = (need + 1) // 2
            blocks = self._block + np.arange(nblocks)
            d0, d1 = uniform_pairs(self._seed, self._word1, self._unit,
                                   self._iteration, blocks)
            pair = np.empty(2 * nblocks)
            pair[0::2] = d0
            pair[1::2] = d1
            out[pos:] = pair[:need]
            if need % 2:
                self._leftover = pair[need]
            self._block += nblocks
        return out


def update_stream(seed, agent, iteration):
    """Stream feeding one agent's position update at one iteration."""
    return Stream(seed, PURPOSE_UPDATE, agent, iteration)
