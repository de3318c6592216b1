"""Certified lower/upper bounds on the entropy rate by tree enumeration.

For each depth ``n`` every observation prefix ``z`` of length ``n`` is
carried as a :class:`PathState`: its probability, the belief reached from
the stationary start, and the image ``[F_z(0), F_z(1)]`` of the unit
interval under the composed belief map.  With ``phi = hb o g0``

* ``H(n) = sum_z P(z) * phi(belief_z)``
* ``L(n) = sum_z P(z) * min phi over [lo_z, hi_z]``
* ``U(n) = sum_z P(z) * max phi over [lo_z, hi_z]``

``L(n) <= h(Z) <= U(n)``, ``L`` is nondecreasing, ``U`` nonincreasing, and
under contraction ``U(n) - L(n) <= bigM * delta**n``.
"""

import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import _backend, model
from .errors import CapacityError, ParameterError
from .summation import combine

HARD_CAP = 30
# 2**26 nodes is 2 GiB per level (four float64 fields).
NODE_BUDGET = 2**26


def default_threads():
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


@dataclass(frozen=True)
class PathState:
    prob: float
    belief: float
    lo: float
    hi: float


@dataclass(frozen=True)
class BoundsRow:
    n: int
    L: float
    H: float
    U: float
    width: float
    geo: float = None

    def as_dict(self):
        return {"n": self.n, "L": self.L, "H": self.H, "U": self.U,
                "width": self.width, "geo": self.geo}


@dataclass
class ConvergenceReport:
    params: model.ModelParams
    contraction: model.ContractionInfo
    tol: float
    n_max: int
    rows: list = field(default_factory=list)
    converged: bool = False
    elapsed: float = 0.0
    threads: int = 1
    backend: str = _backend.NAME

    @property
    def final(self):
        return self.rows[-1]

    @property
    def estimate(self):
        return 0.5 * (self.final.L + self.final.U)

    @property
    def guaranteed_error(self):
        return 0.5 * (self.final.U - self.final.L)


class Level:
    """All path states at one depth, stored as parallel arrays."""

    __slots__ = ("depth", "prob", "belief", "lo", "hi")

    def __init__(self, depth, prob, belief, lo, hi):
        self.depth = depth
        self.prob = prob
        self.belief = belief
        self.lo = lo
        self.hi = hi

    @classmethod
    def root(cls, params):
        return cls(0, np.ones(1), np.full(1, params.p0), np.zeros(1), np.ones(1))

    def __len__(self):
        return self.prob.shape[0]

    def state(self, i):
        return PathState(float(self.prob[i]), float(self.belief[i]),
                         float(self.lo[i]), float(self.hi[i]))

    def states(self):
        return [self.state(i) for i in range(len(self))]


def phi(params, y):
    """Conditional entropy of the next symbol at belief ``y``: ``hb(g0(y))``."""
    return model.hb(model.g0(params, y))


def crossing_point(params):
    """Belief ``y*`` with ``g0(y*) = 1/2``; None when ``g0`` is constant."""
    slope = params.a * (1.0 - 2.0 * params.eps)
    if not slope > 0:
        return None
    return (0.5 - params.eps - (1.0 - 2.0 * params.eps) * params.pi10) / slope


def extremize_phi(params, lo, hi):
    """Exact ``(min, max)`` of ``phi`` over ``[lo, hi]``.

    ``phi`` rises up to ``y*`` and falls after it, so the minimum is at an
    endpoint and the maximum is 1 when ``y*`` is inside the interval.
    """
    if not 0.0 <= lo <= hi <= 1.0:
        raise ValueError(f"need 0 <= lo <= hi <= 1, got [{lo}, {hi}]")
    ystar = crossing_point(params)
    if ystar is None:
        return 1.0, 1.0
    a, b = phi(params, lo), phi(params, hi)
    mx = 1.0 if lo <= ystar <= hi else max(a, b)
    return min(a, b), mx


def level_expand(params, level, node_budget=NODE_BUDGET, threads=1, kernels=None):
    """Children of every state in ``level``.

    Child ``2*i`` extends prefix ``i`` with symbol 0, child ``2*i + 1`` with
    symbol 1.
    """
    if 2 * len(level) > node_budget:
        raise CapacityError(
            f"depth {level.depth + 1} needs {2 * len(level)} nodes, budget is {node_budget}"
        )
    k = kernels or _backend.kernels
    arrays = k.expand_level(level.prob, level.belief, level.lo, level.hi,
                            params.a, params.pi10, params.eps, threads)
    return Level(level.depth + 1, *arrays)


def compute_row(params, level, info, threads=1, kernels=None):
    k = kernels or _backend.kernels
    totals, carries = k.row_partials(level.prob, level.belief, level.lo, level.hi,
                                     params.a, params.pi10, params.eps, threads)
    H, L, U = (combine(totals[:, j], carries[:, j]) for j in range(3))
    return BoundsRow(n=level.depth, L=L, H=H, U=U, width=U - L,
                     geo=info.envelope(level.depth))


def iter_rows(params, n_max, threads=1, node_budget=NODE_BUDGET, kernels=None):
    """Yield ``(level, row)`` for depths ``0 .. n_max``."""
    info = model.contraction(params)
    level = Level.root(params)
    while True:
        yield level, compute_row(params, level, info, threads, kernels)
        if level.depth >= n_max:
            return
        level = level_expand(params, level, node_budget, threads, kernels)


def run(params, tol, n_max=25, threads=None, node_budget=NODE_BUDGET, kernels=None,
        progress=None):
    """Expand depth by depth until ``U - L <= 2*tol`` or ``n_max`` is reached.

    Parameters
    ----------
    params : ModelParams
    tol : float
        Target half-width of the bracketing interval, in bits.
    n_max : int
        Deepest level to compute, at most ``HARD_CAP``.
    threads : int, optional
        Worker count for the kernels; defaults to the available cores.
        Results do not depend on it.
    progress : callable, optional
        Called with each :class:`BoundsRow` as it is produced.
    """
    if not isinstance(params, model.ModelParams):
        raise ParameterError("params", "params must come from model.validate()")
    if not tol > 0:
        raise ParameterError("tol", f"tol must be positive, got {tol!r}")
    if not 0 <= n_max <= HARD_CAP:
        raise CapacityError(f"n_max must be in [0, {HARD_CAP}], got {n_max}")
    threads = default_threads() if threads is None else max(1, int(threads))
    report = ConvergenceReport(params, model.contraction(params), tol, n_max,
                               threads=threads,
                               backend=(kernels or _backend.kernels).NAME)
    start = time.perf_counter()
    for _, row in iter_rows(params, n_max, threads, node_budget, kernels):
        report.rows.append(row)
        if progress is not None:
            progress(row)
        if row.width <= 2.0 * tol:
            report.converged = True
            break
    report.elapsed = time.perf_counter() - start
    return report
