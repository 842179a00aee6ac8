import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wigner_lab import readout


def test_escape_probabilities():
    s = readout.escape_probabilities([0.5, 0.3, 0.2])
    assert np.allclose(s, [1.0, 0.5, 0.2])


def test_cumulative_estimate_sums_to_one(rng):
    p = np.array([0.4, 0.3, 0.2, 0.1])
    est = readout.sample_populations(p, 50, rng, size=200)
    assert est.shape == (200, 4)
    assert np.allclose(est.sum(-1), 1.0)


def test_cumulative_estimate_unbiased_with_binomial_spread(rng):
    p = np.array([0.5, 0.25, 0.15, 0.1])
    r = 900
    est = readout.sample_populations(p, r, rng, size=40000)
    assert np.allclose(est.mean(0), p, atol=1e-3)
    s_hat = readout.escape_probabilities(est)
    sigma = readout.binomial_sigma(readout.escape_probabilities(p), r)
    assert np.allclose(s_hat.std(0)[1:], sigma[1:], rtol=0.03)


def test_cumulative_draws_are_independent(rng):
    p = np.array([0.2, 0.5, 0.3])
    est = readout.sample_populations(p, 100, rng, size=40000)
    s = readout.escape_probabilities(est)
    assert abs(np.corrcoef(s[:, 1], s[:, 2])[0, 1]) < 0.03


def test_noise_can_give_negative_entries(rng):
    est = readout.sample_populations([0.98, 0.01, 0.01], 30, rng, size=2000)
    assert est.min() < 0


def test_multinomial(rng):
    p = np.array([0.6, 0.3, 0.1])
    est = readout.sample_populations(p, 500, rng, method="multinomial", size=20000)
    assert np.allclose(est.sum(-1), 1.0)
    assert est.min() >= 0
    assert np.allclose(est.mean(0), p, atol=2e-3)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 5000), st.integers(0, 2**31 - 1))
def test_estimates_converge_in_distribution(r, seed):
    p = np.array([0.7, 0.2, 0.1])
    est = readout.sample_populations(p, r, np.random.default_rng(seed))
    assert np.all(np.abs(est) <= 1.0 + 1e-12)
    assert np.all(np.abs(est * r - np.rint(est * r)) < 1e-9)


def test_same_seed_same_draws():
    p = [0.5, 0.5]
    a = readout.sample_populations(p, 100, np.random.default_rng(3), size=10)
    b = readout.sample_populations(p, 100, np.random.default_rng(3), size=10)
    assert np.array_equal(a, b)


def test_config_validation():
    with pytest.raises(ValueError):
        readout.ReadoutConfig(0)
    with pytest.raises(ValueError):
        readout.ReadoutConfig(method="poisson")
    with pytest.raises(ValueError):
        readout.sample_populations([1.0], 10, np.random.default_rng(0), method="x")
    with pytest.raises(ValueError):
        readout.populations(np.eye(3) / 3, 4)
    assert np.allclose(readout.populations(np.diag([0.5, 0.3, 0.2]), 2), [0.5, 0.3])
