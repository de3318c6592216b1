"""Compensated summation helpers.

Per-level sums run over up to 2**30 terms.  Long arrays are reduced in
fixed-size chunks with a Neumaier (improved Kahan) accumulator per chunk,
and the chunk partials are combined with :func:`math.fsum`.  The chunk size
is fixed independently of the worker count, so the result does not depend
on how the work was split.
"""

import math

import numpy as np

CHUNK = 4096


class NeumaierSum:
    """Running compensated sum.

    >>> acc = NeumaierSum()
    >>> for v in (1e100, 1.0, -1e100):
    ...     acc.add(v)
    >>> acc.value
    1.0
    """

    __slots__ = ("total", "carry")

    def __init__(self):
        self.total = 0.0
        self.carry = 0.0

    def add(self, value):
        t = self.total + value
        if abs(self.total) >= abs(value):
            self.carry += (self.total - t) + value
        else:
            self.carry += (value - t) + self.total
        self.total = t

    @property
    def value(self):
        return self.total + self.carry


def chunk_partials(values, chunk=CHUNK):
    """Neumaier sums of consecutive ``chunk``-sized slices of ``values``.

    Vectorised across chunks: the loop runs over the position inside a
    chunk.  Returns ``(totals, carries)`` arrays, one entry per chunk.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    nchunks = -(-n // chunk) if n else 0
    if nchunks <= 1:
        acc = NeumaierSum()
        for v in values.tolist():
            acc.add(v)
        return np.array([acc.total]), np.array([acc.carry])
    padded = np.zeros(nchunks * chunk)
    padded[:n] = values
    rows = padded.reshape(nchunks, chunk)
    total = np.zeros(nchunks)
    carry = np.zeros(nchunks)
    for j in range(chunk if nchunks else 0):
        v = rows[:, j]
        t = total + v
        big = np.abs(total) >= np.abs(v)
        carry += np.where(big, (total - t) + v, (v - t) + total)
        total = t
    return total, carry


def combine(totals, carries):
    """Correctly rounded sum of chunk partials."""
    return math.fsum(np.concatenate([np.ravel(totals), np.ravel(carries)]).tolist())


def compensated_sum(values, chunk=CHUNK):
    """Compensated sum of a 1-d array."""
    return combine(*chunk_partials(values, chunk))
