"""Pure NumPy implementation of the tree kernels.

Mirrors the compiled ``_kernels`` module function for function.  Index
layout: the node for prefix ``z_1 ... z_k`` lives at the integer whose
binary digits (most significant first) are ``z_1 ... z_k``, so the children
of node ``i`` are ``2*i`` (symbol 0) and ``2*i + 1`` (symbol 1).
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .summation import CHUNK, chunk_partials

NAME = "numpy"


def _ranges(n, nthreads, align=1):
    nthreads = max(1, int(nthreads))
    step = -(-n // nthreads) if n else 0
    step = -(-step // align) * align if step else 0
    return [(s, min(s + step, n)) for s in range(0, n, step)] if step else []


def _run(fn, ranges, nthreads):
    if nthreads <= 1 or len(ranges) <= 1:
        for r in ranges:
            fn(*r)
        return
    with ThreadPoolExecutor(max_workers=nthreads) as pool:
        list(pool.map(lambda r: fn(*r), ranges))


def _phi(y, a, pi10, eps):
    g = eps + (1.0 - 2.0 * eps) * (a * y + pi10)
    h = 1.0 - g
    with np.errstate(divide="ignore", invalid="ignore"):
        return -np.where(g > 0, g * np.log2(g), 0.0) - np.where(h > 0, h * np.log2(h), 0.0)


def _f0(q, eps):
    return np.minimum((1.0 - eps) / ((1.0 - 2.0 * eps) + eps / q), 1.0)


def _f1(q, eps):
    return np.minimum(eps / ((1.0 - eps) / q - (1.0 - 2.0 * eps)), 1.0)


def expand_level(prob, belief, lo, hi, a, pi10, eps, nthreads=1):
    n = prob.shape[0]
    out = [np.empty(2 * n) for _ in range(4)]
    cprob, cbel, clo, chi = out

    def work(s, e):
        q = a * belief[s:e] + pi10
        g = eps + (1.0 - 2.0 * eps) * q
        h = 1.0 - g
        cprob[2 * s:2 * e:2] = prob[s:e] * g
        cprob[2 * s + 1:2 * e:2] = prob[s:e] * h
        for src, dst in ((belief, cbel), (lo, clo), (hi, chi)):
            q = a * src[s:e] + pi10
            dst[2 * s:2 * e:2] = _f0(q, eps)
            dst[2 * s + 1:2 * e:2] = _f1(q, eps)

    _run(work, _ranges(n, nthreads), nthreads)
    return cprob, cbel, clo, chi


def row_partials(prob, belief, lo, hi, a, pi10, eps, nthreads=1):
    """Chunked Neumaier partial sums of the H, L and U terms.

    Returns ``(totals, carries)``, each of shape ``(nchunks, 3)``.
    """
    n = prob.shape[0]
    nchunks = -(-n // CHUNK)
    totals = np.zeros((nchunks, 3))
    carries = np.zeros((nchunks, 3))
    slope = a * (1.0 - 2.0 * eps)
    ystar = (0.5 - eps - (1.0 - 2.0 * eps) * pi10) / slope if slope > 0 else None

    def work(s, e):
        p = prob[s:e]
        pl = _phi(lo[s:e], a, pi10, eps)
        ph = _phi(hi[s:e], a, pi10, eps)
        mx = np.maximum(pl, ph)
        if ystar is None:
            mx = np.ones_like(mx)
        else:
            mx = np.where((lo[s:e] <= ystar) & (ystar <= hi[s:e]), 1.0, mx)
        terms = np.stack([p * _phi(belief[s:e], a, pi10, eps), p * np.minimum(pl, ph), p * mx])
        c0 = s // CHUNK
        for col in range(3):
            tot, car = chunk_partials(terms[col])
            totals[c0:c0 + tot.shape[0], col] = tot
            carries[c0:c0 + tot.shape[0], col] = car

    _run(work, _ranges(n, nthreads, align=CHUNK), nthreads)
    return totals, carries
