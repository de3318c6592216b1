"""Built-in invariant checks run by ``hmpbounds validate``."""

import itertools
from dataclasses import dataclass

import numpy as np

from . import bounds, forward, model

DEFAULT_PARAMS = ((0.1, 0.1, 0.01), (0.2, 0.1, 0.05), (0.1, 0.1, 0.0))
SLACK = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class Sizes:
    conservation: int
    oracle: int
    bounds: int
    chain: int


FULL = Sizes(conservation=12, oracle=10, bounds=18, chain=12)
QUICK = Sizes(conservation=8, oracle=6, bounds=10, chain=8)


def _bitstrings(n):
    return ("".join(b) for b in itertools.product("01", repeat=n))


def check_conservation(params, n_max):
    worst = max(abs(forward.level_probs(params, n).sum() - 1.0) for n in range(1, n_max + 1))
    return worst <= SLACK, f"max |sum P - 1| = {worst:.3e} for n <= {n_max}"


def check_oracle(params, n_max, fault=False):
    sign = -1.0 if fault else 1.0
    worst = 0.0
    for n in range(1, n_max + 1):
        for z in _bitstrings(n):
            diff = abs(forward.sequence_prob(params, z)[0] - sign * forward.brute_force_prob(params, z))
            worst = max(worst, diff)
    return worst <= SLACK, f"max |recursion - brute force| = {worst:.3e} for n <= {n_max}"


def check_fixed_point(params):
    err = abs(params.p0 * params.a + params.pi10 - params.p0)
    return err <= 1e-15, f"|p0*a + pi10 - p0| = {err:.3e}"


def fd_slopes(fn, grid=10**4, h=1e-5):
    """|fn'| on a uniform grid of [0, 1] by second-order finite differences.

    Central differences inside, one-sided three-point stencils at the ends.
    """
    x = np.linspace(0.0, 1.0, grid)
    d = (fn(x + h) - fn(x - h)) / (2 * h)
    d[0] = (-3 * fn(x[:1]) + 4 * fn(x[:1] + h) - fn(x[:1] + 2 * h))[0] / (2 * h)
    d[-1] = (3 * fn(x[-1:]) - 4 * fn(x[-1:] - h) + fn(x[-1:] - 2 * h))[0] / (2 * h)
    return np.abs(d)


def fd_contraction(params, grid=10**4):
    """Finite-difference estimates of ``(delta, bigM)``."""
    delta = max(fd_slopes(lambda t: model.f0(params, t), grid).max(),
                fd_slopes(lambda t: model.f1(params, t), grid).max())
    bigM = fd_slopes(lambda t: model.hb(model.g0(params, t)), grid).max()
    return float(delta), float(bigM)


def check_contraction(params, tol=1e-6):
    """Closed-form delta and bigM against finite differences."""
    info = model.contraction(params)
    fd_delta, fd_M = fd_contraction(params)
    ok = abs(fd_delta - info.delta) <= tol and abs(fd_M - info.bigM) <= tol
    return ok, (f"delta {info.delta:.9f} vs fd {fd_delta:.9f}; "
                f"bigM {info.bigM:.9f} vs fd {fd_M:.9f}")


def bounds_rows(params, n_max):
    return [row for _, row in bounds.iter_rows(params, n_max, threads=1)]


def check_sandwich(rows):
    bad = [r.n for r in rows if not (r.L - SLACK <= r.H <= r.U + SLACK)]
    return not bad, f"violations at n = {bad}" if bad else f"L <= H <= U for n <= {rows[-1].n}"


def check_monotone(rows):
    bad = [b.n for a, b in zip(rows, rows[1:])
           if b.L < a.L - SLACK or b.U > a.U + SLACK]
    return not bad, f"violations at n = {bad}" if bad else "L nondecreasing, U nonincreasing"


def check_envelope(rows):
    bad = [r.n for r in rows if r.geo is not None and r.width > r.geo + SLACK]
    return not bad, f"violations at n = {bad}" if bad else "width <= bigM * delta**n"


def check_chain(params, rows, n_max):
    ent = [forward.block_entropy(params, n) for n in range(n_max + 2)]
    worst = max(abs((ent[n + 1] - ent[n]) - rows[n].H) for n in range(n_max + 1))
    return worst <= 1e-10, f"max |H(n+1) - H(n) - H^(n)| = {worst:.3e} for n <= {n_max}"


def run_checks(param_sets=DEFAULT_PARAMS, quick=False, fault=False):
    """Yield :class:`CheckResult` for every check on every parameter set."""
    sizes = QUICK if quick else FULL
    for triple in param_sets:
        params = model.validate(*triple)
        tag = "({}, {}, {})".format(*triple)
        rows = bounds_rows(params, max(sizes.bounds, sizes.chain))

        def result(name, outcome):
            return CheckResult(f"{name} {tag}", bool(outcome[0]), outcome[1])

        yield result("fixed-point", check_fixed_point(params))
        yield result("contraction-fd", check_contraction(params))
        yield result("conservation", check_conservation(params, sizes.conservation))
        yield result("oracle-equivalence", check_oracle(params, sizes.oracle, fault))
        yield result("sandwich", check_sandwich(rows))
        yield result("monotonicity", check_monotone(rows))
        yield result("envelope", check_envelope(rows))
        yield result("chain-identity", check_chain(params, rows, sizes.chain))
