"""Belief propagation and exact probabilities of observation strings."""

import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import model
from .errors import LengthError
from .summation import chunk_partials, combine

N_MAX = 30
ORACLE_MAX = 14
# Depth enumerated in one array inside block_entropy; deeper strings are
# produced subtree by subtree to bound memory.
_BLOCK_DEPTH = 20
# Fixed split depth for the worker partition (independent of worker count).
_SPLIT_DEPTH = 3


@dataclass(frozen=True)
class BeliefTrace:
    """Result of :func:`sequence_prob`.

    ``beliefs[k]`` is ``P(X_k = 0 | Z_1^k)``; entry 0 is the stationary
    start ``p0``.
    """

    beliefs: tuple
    prob: float


def parse_bits(z, n_max=N_MAX):
    """Normalise a bit string or sequence to a tuple of ints.

    Raises
    ------
    ValueError
        If a symbol is not 0 or 1.
    LengthError
        If the length exceeds ``n_max``.
    """
    if isinstance(z, str):
        if any(c not in "01" for c in z):
            raise ValueError(f"observation string must contain only '0' and '1', got {z!r}")
        bits = tuple(int(c) for c in z)
    else:
        bits = tuple(int(b) for b in z)
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"observation symbols must be 0 or 1, got {z!r}")
    if n_max is not None and len(bits) > n_max:
        raise LengthError(f"observation length {len(bits)} exceeds n_max={n_max}")
    return bits


def belief_step(params, belief, symbol):
    return model.f0(params, belief) if symbol == 0 else model.f1(params, belief)


def compose_F(params, z, x):
    """Apply the belief updates for ``z`` left to right, starting from ``x``."""
    for b in parse_bits(z, n_max=None):
        x = belief_step(params, x, b)
    return float(x)


def sequence_prob(params, z, n_max=N_MAX):
    """P(Z_1^n = z) by the multiplicative predictive recursion.

    The empty string has probability 1.
    """
    bits = parse_bits(z, n_max)
    belief = params.p0
    beliefs = [belief]
    prob = 1.0
    for b in bits:
        prob *= model.g0(params, belief) if b == 0 else model.g1(params, belief)
        belief = float(belief_step(params, belief, b))
        beliefs.append(belief)
    return float(prob), BeliefTrace(tuple(beliefs), float(prob))


@functools.lru_cache(maxsize=32)
def _hidden_paths(params, n):
    """All hidden paths of length ``n`` with their stationary chain probabilities."""
    xs = (np.arange(2**n)[:, None] >> np.arange(n - 1, -1, -1)) & 1
    trans = np.array([[1.0 - params.pi01, params.pi01],
                      [params.pi10, 1.0 - params.pi10]])
    prior = np.where(xs[:, 0] == 0, params.p0, 1.0 - params.p0)
    for k in range(1, n):
        prior = prior * trans[xs[:, k - 1], xs[:, k]]
    return xs, prior


def brute_force_prob(params, z):
    """P(Z_1^n = z) by summing over every hidden path.

    Independent of the belief recursion: each hidden path ``x`` contributes
    its stationary Markov probability times the channel likelihood
    ``prod_k (eps if z_k != x_k else 1 - eps)``.
    """
    bits = parse_bits(z, n_max=None)
    n = len(bits)
    if n > ORACLE_MAX:
        raise LengthError(f"brute-force oracle is limited to n <= {ORACLE_MAX}, got {n}")
    if n == 0:
        return 1.0
    xs, prior = _hidden_paths(params, n)
    mismatches = (xs != np.array(bits)).sum(axis=1)
    like = params.eps**mismatches * (1.0 - params.eps) ** (n - mismatches)
    return math.fsum((prior * like).tolist())


def level_probs(params, n):
    """Probabilities of all ``2**n`` strings of length ``n``.

    Index ``i`` holds the string whose binary digits, most significant
    first, are the symbols.
    """
    prob = np.ones(1)
    belief = np.full(1, params.p0)
    for _ in range(n):
        prob, belief = _expand(params, prob, belief)
    return prob


def _expand(params, prob, belief):
    q = params.a * belief + params.pi10
    g = params.eps + (1.0 - 2.0 * params.eps) * q
    h = 1.0 - g
    cprob = np.empty(2 * prob.shape[0])
    cbel = np.empty_like(cprob)
    cprob[0::2] = prob * g
    cprob[1::2] = prob * h
    cbel[0::2] = model.f0(params, belief)
    cbel[1::2] = model.f1(params, belief)
    return cprob, cbel


def _neg_plogp(p):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(p > 0, -p * np.log2(p), 0.0)


def block_entropy(params, n, n_max=N_MAX, workers=1):
    """Block entropy ``H(Z_1^n)`` in bits.

    The string space is split into a fixed set of subtrees; subtree partial sums are combined in index order, so
    the value does not depend on ``workers``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > n_max:
        raise LengthError(f"block length {n} exceeds n_max={n_max}")
    top = max(n - _BLOCK_DEPTH, min(n, _SPLIT_DEPTH))
    prob = np.ones(1)
    belief = np.full(1, params.p0)
    for _ in range(top):
        prob, belief = _expand(params, prob, belief)
    rest = n - top

    def subtree(i):
        p, b = prob[i:i + 1], belief[i:i + 1]
        for _ in range(rest):
            p, b = _expand(params, p, b)
        return chunk_partials(_neg_plogp(p))

    idx = range(prob.shape[0])
    if workers > 1 and prob.shape[0] > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(subtree, idx))
    else:
        parts = [subtree(i) for i in idx]
    return combine([t for t, _ in parts], [c for _, c in parts])
