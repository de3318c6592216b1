import io
import math

import numpy as np
import pytest

from hmpbounds import model, simulate
from hmpbounds.errors import InsufficientDataError


def binomial_se(p, n):
    return math.sqrt(p * (1 - p) / n)


def test_determinism(paper_params):
    a = simulate.sample_path(paper_params, 10_000, 7)
    b = simulate.sample_path(paper_params, 10_000, 7)
    c = simulate.sample_path(paper_params, 10_000, 8)
    assert np.array_equal(a.hidden, b.hidden) and np.array_equal(a.observed, b.observed)
    assert not np.array_equal(a.observed, c.observed)
    assert len(a) == 10_000 and a.seed == 7


def test_short_paths():
    p = model.validate(0.3, 0.2, 0.1)
    for n in (1, 2, 3, 17):
        path = simulate.sample_path(p, n, 0)
        assert path.hidden.shape == path.observed.shape == (n,)
    with pytest.raises(ValueError):
        simulate.sample_path(p, 0, 0)


def test_marginals(paper_params):
    n = 10**6
    path = simulate.sample_path(paper_params, n, 123)
    zero_freq = 1.0 - path.hidden.mean()
    # The hidden chain is positively correlated: inflate the i.i.d. standard
    # error by sqrt((1 + a) / (1 - a)) for lag-1 autocorrelation a = 0.8.
    se = binomial_se(0.5, n) * math.sqrt(1.8 / 0.2)
    assert abs(zero_freq - 0.5) <= 3 * se
    flip = (path.hidden != path.observed).mean()
    assert abs(flip - 0.01) <= 3 * binomial_se(0.01, n)
    obs_zero = 1.0 - path.observed.mean()
    assert abs(obs_zero - model.g0(paper_params, paper_params.p0)) <= 3 * se


def test_transition_rates():
    p = model.validate(0.1, 0.3, 0.05)
    h = simulate.sample_path(p, 10**6, 4).hidden
    prev, nxt = h[:-1], h[1:]
    r01 = nxt[prev == 0].mean()
    r10 = 1.0 - nxt[prev == 1].mean()
    assert abs(r01 - 0.1) <= 3 * binomial_se(0.1, int((prev == 0).sum()))
    assert abs(r10 - 0.3) <= 3 * binomial_se(0.3, int((prev == 1).sum()))


def test_zero_noise_observed_equals_hidden():
    p = model.validate(0.1, 0.1, 0.0)
    path = simulate.sample_path(p, 10**5, 3)
    assert np.array_equal(path.hidden, path.observed)


def test_plugin_fair_bits():
    p = model.validate(0.1, 0.1, 0.5)
    est = simulate.plugin_entropy_rate(simulate.sample_path(p, 10**6, 1).observed, 4)
    assert est.stderr > 0
    assert abs(est.value - 1.0) <= 3 * est.stderr
    assert est.block_k == 4 and est.n_samples == 10**6


def test_plugin_markov_chain():
    p = model.validate(0.1, 0.1, 0.0)
    est = simulate.plugin_entropy_rate(simulate.sample_path(p, 10**6, 2).observed, 4)
    hb01 = -0.1 * math.log2(0.1) - 0.9 * math.log2(0.9)
    assert abs(est.value - hb01) <= 3 * est.stderr


def test_plugin_counts_by_hand():
    # Period-2 sequence: the next symbol is determined by the previous one.
    z = np.tile([0, 1], 500)
    assert simulate.plugin_entropy_rate(z, 1).value == 0.0
    # k = 0 reduces to the marginal entropy.
    z = np.array([0, 0, 0, 1] * 250)
    assert simulate.plugin_entropy_rate(z, 0).value == pytest.approx(
        -0.75 * math.log2(0.75) - 0.25 * math.log2(0.25), abs=1e-15)


def test_plugin_insufficient_data():
    with pytest.raises(InsufficientDataError):
        simulate.plugin_entropy_rate(np.zeros(1599, dtype=int), 4)
    simulate.plugin_entropy_rate(np.zeros(1600, dtype=int), 4)


def test_plugin_nonincreasing_in_k(paper_params):
    z = simulate.sample_path(paper_params, 10**7, 99).observed
    ests = [simulate.plugin_entropy_rate(z, k) for k in (2, 4, 6, 8)]
    for a, b in zip(ests, ests[1:]):
        assert b.value <= a.value + 2 * max(a.stderr, b.stderr)


@pytest.mark.parametrize("fmt", ["ascii", "packed"])
def test_path_round_trip(fmt):
    bits = np.random.default_rng(0).integers(0, 2, 1003).astype(np.uint8)
    buf = io.BytesIO()
    simulate.write_path(bits, buf, fmt)
    assert np.array_equal(simulate.read_path(buf.getvalue(), fmt, n=1003), bits)


def test_packed_layout():
    buf = io.BytesIO()
    simulate.write_path([1, 0, 0, 0, 0, 0, 0, 1, 1], buf, "packed")
    assert buf.getvalue() == bytes([0b10000001, 0b10000000])
    buf = io.BytesIO()
    simulate.write_path([1, 0, 1], buf, "ascii")
    assert buf.getvalue() == b"101\n"
