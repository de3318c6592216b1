"""Sampling the noisy Markov chain and plug-in entropy-rate estimates.

Random numbers come from NumPy's PCG64 bit generator seeded with the
user's integer seed.  Draw order is fixed: the initial state, then the
sojourn lengths of the hidden chain in batches, then the channel flips.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError

GENERATOR = "numpy.random.PCG64"
BOOTSTRAP_RESAMPLES = 64


@dataclass(frozen=True)
class SamplePath:
    hidden: np.ndarray
    observed: np.ndarray
    seed: int

    def __len__(self):
        return self.hidden.shape[0]


@dataclass(frozen=True)
class McEstimate:
    value: float
    stderr: float
    n_samples: int
    block_k: int

    def as_dict(self):
        return {"value": self.value, "stderr": self.stderr,
                "n_samples": self.n_samples, "block_k": self.block_k}


def sample_path(params, n, seed):
    """Draw ``n`` steps of the hidden chain and its noisy observation.

    The chain starts from the stationary law.  Sojourn times in state 0 and
    1 are geometric with success probabilities ``pi01`` and ``pi10``, so the
    hidden path is assembled from alternating run lengths.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    state = 0 if rng.random() < params.p0 else 1
    rates = (params.pi01, params.pi10)
    # Mean run length is at most 1/min(rates); overshoot so one batch usually suffices.
    batch = int(2 * n * max(rates)) // 2 * 2 + 64
    runs, states, total = [], [], 0
    while total < n:
        r0 = rng.geometric(rates[state], size=batch // 2)
        r1 = rng.geometric(rates[1 - state], size=batch // 2)
        lengths = np.empty(batch, dtype=np.int64)
        lengths[0::2] = r0
        lengths[1::2] = r1
        labels = np.empty(batch, dtype=np.uint8)
        labels[0::2] = state
        labels[1::2] = 1 - state
        runs.append(lengths)
        states.append(labels)
        total += int(lengths.sum())
    hidden = np.repeat(np.concatenate(states), np.concatenate(runs))[:n]
    flips = (rng.random(n) < params.eps).astype(np.uint8)
    return SamplePath(hidden=hidden, observed=hidden ^ flips, seed=seed)


def _block_codes(z, width):
    codes = np.zeros(z.shape[0] - width + 1, dtype=np.int64)
    for j in range(width):
        codes = (codes << 1) | z[j:z.shape[0] - width + 1 + j]
    return codes


def _conditional_entropy(counts):
    """H(last symbol | preceding k) from (k+1)-block counts, in bits."""
    pairs = counts.reshape(-1, 2)
    ctx = pairs.sum(axis=1, keepdims=True)
    total = pairs.sum()
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(pairs > 0, pairs * np.log2(ctx / pairs), 0.0)
    return float(terms.sum() / total)


def plugin_entropy_rate(z, k, seed=0):
    """Empirical ``H(Z_{k+1} | Z_1^k)`` from overlapping (k+1)-block counts.

    The standard error comes from a block bootstrap: the block-code
    sequence is cut into contiguous segments, per-segment counts are
    resampled with replacement 64 times, and the spread of the resampled
    estimates is reported.

    Raises
    ------
    InsufficientDataError
        If ``len(z) < 100 * 2**k``.
    """
    z = np.asarray(z, dtype=np.int64)
    if k < 0:
        raise ValueError("k must be nonnegative")
    if z.shape[0] < 100 * 2**k:
        raise InsufficientDataError(
            f"need at least {100 * 2**k} symbols for block length k={k}, got {z.shape[0]}"
        )
    width = k + 1
    codes = _block_codes(z, width)
    nbins = 2**width
    counts = np.bincount(codes, minlength=nbins)
    value = _conditional_entropy(counts)

    nseg = int(max(8, min(256, codes.shape[0] // 1000)))
    seg = np.repeat(np.arange(nseg), -(-codes.shape[0] // nseg))[:codes.shape[0]]
    per_seg = np.bincount(seg * nbins + codes, minlength=nseg * nbins).reshape(nseg, nbins)
    rng = np.random.Generator(np.random.PCG64(seed))
    boot = np.empty(BOOTSTRAP_RESAMPLES)
    for b in range(BOOTSTRAP_RESAMPLES):
        pick = rng.integers(0, nseg, size=nseg)
        boot[b] = _conditional_entropy(per_seg[pick].sum(axis=0))
    return McEstimate(value=value, stderr=float(boot.std(ddof=1)),
                      n_samples=int(z.shape[0]), block_k=int(k))


def write_path(bits, fh, fmt="ascii"):
    """Write a bit sequence to a binary file handle.

    ``ascii``: one line of '0'/'1' characters.  ``packed``: eight symbols
    per byte, most significant bit first, last byte zero-padded.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    if fmt == "ascii":
        fh.write((bits + ord("0")).tobytes() + b"\n")
    elif fmt == "packed":
        fh.write(np.packbits(bits).tobytes())
    else:
        raise ValueError(f"unknown path format {fmt!r}")


def read_path(data, fmt="ascii", n=None):
    """Inverse of :func:`write_path`; ``n`` trims packed padding."""
    if fmt == "ascii":
        raw = np.frombuffer(data.strip(), dtype=np.uint8)
        return raw - ord("0")
    if fmt == "packed":
        bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
        return bits if n is None else bits[:n]
    raise ValueError(f"unknown path format {fmt!r}")
