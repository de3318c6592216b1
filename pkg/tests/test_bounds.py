import math

import numpy as np
import pytest

from hmpbounds import bounds, forward, model
from hmpbounds.errors import CapacityError, ParameterError

HB_0108 = -0.108 * math.log2(0.108) - 0.892 * math.log2(0.892)
PARAM_SETS = [(0.1, 0.1, 0.01), (0.2, 0.1, 0.05), (0.1, 0.3, 0.05), (0.4, 0.45, 0.3), (0.1, 0.1, 0.0)]


def rows_for(triple, n_max, kernels=None):
    p = model.validate(*triple)
    return [row for _, row in bounds.iter_rows(p, n_max, kernels=kernels)]


def test_phi_values(paper_params):
    assert bounds.phi(paper_params, 0.5) == 1.0
    assert bounds.phi(paper_params, 0.0) == pytest.approx(HB_0108, abs=1e-15)
    assert bounds.phi(paper_params, 1.0) == pytest.approx(HB_0108, abs=1e-15)


def test_crossing_point(paper_params):
    assert bounds.crossing_point(paper_params) == pytest.approx(0.5, abs=1e-15)
    assert bounds.crossing_point(model.validate(0.1, 0.2, 0.5)) is None
    p = model.validate(0.1, 0.3, 0.05)
    assert model.g0(p, bounds.crossing_point(p)) == pytest.approx(0.5, abs=1e-15)


def test_extremize_unit_interval(paper_params):
    lo, hi = bounds.extremize_phi(paper_params, 0.0, 1.0)
    assert lo == pytest.approx(0.49385, abs=1e-5)
    assert hi == 1.0


def test_extremize_point(paper_params):
    v = bounds.phi(paper_params, 0.3)
    assert bounds.extremize_phi(paper_params, 0.3, 0.3) == (v, v)


def test_extremize_right_of_peak(paper_params):
    a = float(model.f0(paper_params, 0.0))
    b = float(model.f0(paper_params, 1.0))
    assert a == pytest.approx(0.91667, abs=1e-5)
    assert b == pytest.approx(0.99888, abs=1e-5)
    lo, hi = bounds.extremize_phi(paper_params, a, b)
    assert lo == bounds.phi(paper_params, b)
    assert hi == bounds.phi(paper_params, a)
    grid = bounds.phi(paper_params, np.linspace(a, b, 10**5))
    assert lo == pytest.approx(grid.min(), abs=1e-15)
    assert hi == pytest.approx(grid.max(), abs=1e-15)


@pytest.mark.parametrize("triple", PARAM_SETS)
def test_extremize_against_grid_scan(triple):
    p = model.validate(*triple)
    rng = np.random.default_rng(5)
    for _ in range(50):
        lo, hi = np.sort(rng.random(2))
        mn, mx = bounds.extremize_phi(p, lo, hi)
        grid = bounds.phi(p, np.linspace(lo, hi, 20001))
        assert mn <= grid.min() + 1e-15
        assert mx >= grid.max() - 1e-15
        assert mx - grid.max() <= 1e-7


def test_extremize_flat():
    p = model.validate(0.1, 0.3, 0.5)
    assert bounds.extremize_phi(p, 0.1, 0.2) == (1.0, 1.0)


def test_extremize_rejects_bad_interval(paper_params):
    with pytest.raises(ValueError):
        bounds.extremize_phi(paper_params, 0.6, 0.5)


def test_level_expand_root(paper_params, kernels):
    child = bounds.level_expand(paper_params, bounds.Level.root(paper_params), kernels=kernels)
    assert child.depth == 1 and len(child) == 2
    np.testing.assert_allclose(child.prob, [0.5, 0.5], atol=1e-15)
    np.testing.assert_allclose(child.belief, [0.99, 0.01], atol=1e-15)
    assert child.lo[0] == pytest.approx(0.99 * 0.1 / 0.108, abs=1e-15)
    assert child.hi[0] == pytest.approx(0.99 * 0.9 / 0.892, abs=1e-15)
    assert child.lo[0] == pytest.approx(0.91667, abs=1e-5)
    assert child.hi[0] == pytest.approx(0.99888, abs=1e-5)


def test_level_expand_zero_noise_collapse(kernels):
    p = model.validate(0.1, 0.1, 0.0)
    level = bounds.Level.root(p)
    for _ in range(4):
        level = bounds.level_expand(p, level, kernels=kernels)
        expected = np.tile([1.0, 0.0], len(level) // 2)
        assert np.array_equal(level.lo, expected)
        assert np.array_equal(level.hi, expected)


def test_level_expand_capacity(paper_params):
    level = bounds.Level.root(paper_params)
    level = bounds.level_expand(paper_params, level, node_budget=2)
    with pytest.raises(CapacityError):
        bounds.level_expand(paper_params, level, node_budget=2)


@pytest.mark.parametrize("triple", PARAM_SETS)
def test_level_states_consistent(triple, kernels):
    """Every state matches an independent per-string computation."""
    p = model.validate(*triple)
    level = bounds.Level.root(p)
    for depth in range(1, 15):
        level = bounds.level_expand(p, level, kernels=kernels)
        assert abs(math.fsum(level.prob.tolist()) - 1.0) <= 1e-12
        assert np.all(level.lo <= level.belief) and np.all(level.belief <= level.hi)
        assert level.lo.min() >= 0.0 and level.hi.max() <= 1.0
    rng = np.random.default_rng(2)
    for i in rng.integers(0, len(level), 25):
        z = format(int(i), "014b")
        s = level.state(int(i))
        assert s.prob == pytest.approx(forward.sequence_prob(p, z)[0], rel=1e-12)
        assert s.belief == pytest.approx(forward.compose_F(p, z, p.p0), abs=1e-14)
        assert s.lo == pytest.approx(forward.compose_F(p, z, 0.0), abs=1e-14)
        assert s.hi == pytest.approx(forward.compose_F(p, z, 1.0), abs=1e-14)


def test_compute_row_base(paper_params, kernels):
    info = model.contraction(paper_params)
    row0 = bounds.compute_row(paper_params, bounds.Level.root(paper_params), info, kernels=kernels)
    assert row0.n == 0
    assert row0.H == 1.0 and row0.U == 1.0
    assert row0.L == pytest.approx(HB_0108, abs=1e-15)
    assert row0.geo == pytest.approx(info.bigM, abs=1e-15)


def test_compute_row_depth_one(paper_params, kernels):
    info = model.contraction(paper_params)
    level = bounds.level_expand(paper_params, bounds.Level.root(paper_params), kernels=kernels)
    row = bounds.compute_row(paper_params, level, info, kernels=kernels)
    g = 0.01 + 0.98 * (0.8 * 0.99 + 0.1)
    assert g == pytest.approx(0.88416, abs=1e-12)
    expected = -g * math.log2(g) - (1 - g) * math.log2(1 - g)
    assert row.H == pytest.approx(expected, abs=1e-14)
    assert row.H == pytest.approx(0.5173, abs=1e-4)


def test_compute_row_matches_pathwise_definition(kernels):
    p = model.validate(0.1, 0.3, 0.05)
    info = model.contraction(p)
    level = bounds.Level.root(p)
    for _ in range(7):
        level = bounds.level_expand(p, level, kernels=kernels)
    row = bounds.compute_row(p, level, info, kernels=kernels)
    H, L, U = [], [], []
    for s in level.states():
        mn, mx = bounds.extremize_phi(p, s.lo, s.hi)
        H.append(s.prob * bounds.phi(p, s.belief))
        L.append(s.prob * mn)
        U.append(s.prob * mx)
    assert row.H == pytest.approx(math.fsum(H), abs=1e-14)
    assert row.L == pytest.approx(math.fsum(L), abs=1e-14)
    assert row.U == pytest.approx(math.fsum(U), abs=1e-14)


@pytest.mark.parametrize("n", [0, 3, 9])
def test_fair_noise_rows_exact(n, kernels):
    for row in rows_for((0.2, 0.3, 0.5), n, kernels):
        assert row.L == row.H == row.U == 1.0


@pytest.mark.parametrize("triple", PARAM_SETS)
def test_row_invariants(triple, kernels):
    rows = rows_for(triple, 16, kernels)
    for r in rows:
        assert r.L - 1e-12 <= r.H <= r.U + 1e-12
        assert 0.0 <= r.L and r.U <= 1.0
        assert r.width >= 0.0
        if r.geo is not None:
            assert r.width <= r.geo + 1e-12
    for a, b in zip(rows, rows[1:]):
        assert b.L >= a.L - 1e-12
        assert b.U <= a.U + 1e-12


@pytest.mark.parametrize("triple", PARAM_SETS)
def test_chain_identity(triple):
    p = model.validate(*triple)
    rows = rows_for(triple, 12)
    ent = [forward.block_entropy(p, n) for n in range(14)]
    for n in range(13):
        assert abs((ent[n + 1] - ent[n]) - rows[n].H) <= 1e-10


def test_interval_brackets_random_prefixes(paper_params):
    rng = np.random.default_rng(17)
    for _ in range(100):
        z = rng.integers(0, 2, rng.integers(0, 16)).tolist()
        lo = forward.compose_F(paper_params, z, 0.0)
        hi = forward.compose_F(paper_params, z, 1.0)
        mn, mx = bounds.extremize_phi(paper_params, lo, hi)
        xs = rng.random(100)
        vals = [bounds.phi(paper_params, forward.compose_F(paper_params, z, x)) for x in xs]
        assert mn - 1e-15 <= min(vals) and max(vals) <= mx + 1e-15


def test_run_paper_example(paper_params):
    report = bounds.run(paper_params, 1e-3, 30, threads=1)
    assert report.converged
    assert report.final.n <= 20
    envelope_depth = next(n for n in range(100) if 2.388 * 0.679012**n < 2e-3)
    assert envelope_depth == 19
    assert report.final.n <= envelope_depth
    assert report.final.width <= 2e-3
    assert report.guaranteed_error == pytest.approx(report.final.width / 2)
    for r in report.rows:
        assert r.L - 1e-12 <= report.estimate <= r.U + 1e-12


def test_run_zero_noise():
    p = model.validate(0.1, 0.1, 0.0)
    report = bounds.run(p, 1e-12, 30, threads=1)
    assert report.converged and report.final.n == 1
    hb01 = -0.1 * math.log2(0.1) - 0.9 * math.log2(0.9)
    assert report.final.L == pytest.approx(hb01, abs=1e-12)
    assert report.final.U == pytest.approx(hb01, abs=1e-12)
    assert report.final.L == pytest.approx(0.46900, abs=1e-5)


def test_run_zero_depth(paper_params):
    report = bounds.run(paper_params, 1e-3, 0)
    assert len(report.rows) == 1 and not report.converged
    assert bounds.run(paper_params, 0.3, 0).converged


def test_run_errors(paper_params):
    with pytest.raises(CapacityError):
        bounds.run(paper_params, 1e-3, 31)
    with pytest.raises(ParameterError):
        bounds.run(paper_params, 0.0, 5)
    with pytest.raises(ParameterError):
        bounds.run((0.1, 0.1, 0.01), 1e-3, 5)
    with pytest.raises(CapacityError):
        bounds.run(paper_params, 1e-30, 12, node_budget=2**10)


def test_run_non_contractive_still_brackets():
    p = model.validate(0.2, 0.1, 0.05)
    report = bounds.run(p, 1e-9, 14, threads=1)
    assert all(r.geo is None for r in report.rows)
    assert report.final.width < report.rows[0].width


def test_run_progress_callback(paper_params):
    seen = []
    report = bounds.run(paper_params, 1e-6, 20, progress=seen.append)
    assert seen == report.rows


def test_run_thread_invariance(paper_params, kernels):
    ref = bounds.run(paper_params, 1e-300, 16, threads=1, kernels=kernels).rows
    for t in (2, 4, 8):
        assert bounds.run(paper_params, 1e-300, 16, threads=t, kernels=kernels).rows == ref
