import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_density_matrix, random_ket
from wigner_lab import fockspace as fs
from wigner_lab import metrics
from wigner_lab.errors import InvalidStateError, UndefinedCorrelationError


def test_fidelity_identical_and_orthogonal():
    a = fs.dm(fs.basis(3, 0))
    assert metrics.fidelity(a, a) == pytest.approx(1.0, abs=1e-12)
    assert metrics.fidelity(a, fs.dm(fs.basis(3, 2))) == pytest.approx(0.0, abs=1e-12)


def test_fidelity_pure_states_is_overlap(rng):
    psi, phi = random_ket(rng, 5), random_ket(rng, 5)
    assert metrics.fidelity(fs.dm(psi), fs.dm(phi)) == pytest.approx(abs(np.vdot(psi, phi)), abs=1e-7)


def test_fidelity_commuting_states():
    p, q = np.array([0.5, 0.3, 0.2]), np.array([0.1, 0.6, 0.3])
    assert metrics.fidelity(np.diag(p), np.diag(q)) == pytest.approx(np.sum(np.sqrt(p * q)), abs=1e-12)


def test_fidelity_maximally_mixed_against_pure():
    assert metrics.fidelity(np.eye(4) / 4, fs.dm(fs.basis(4, 1))) == pytest.approx(0.5, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_fidelity_symmetric_and_bounded(seed):
    g = np.random.default_rng(seed)
    a, b = random_density_matrix(g, 4), random_density_matrix(g, 4, rank=2)
    fab, fba = metrics.fidelity(a, b), metrics.fidelity(b, a)
    assert fab == pytest.approx(fba, abs=1e-7)
    assert 0.0 <= fab <= 1.0


def test_fidelity_rejects_bad_input():
    with pytest.raises(InvalidStateError):
        metrics.fidelity(np.diag([1.1, -0.1]), np.eye(2) / 2)
    with pytest.raises(ValueError):
        metrics.fidelity(np.eye(2) / 2, np.eye(3) / 3)


def test_cross_correlation_properties(rng):
    f = rng.normal(size=(7, 7))
    assert metrics.cross_correlation(f, f) == pytest.approx(1.0)
    assert metrics.cross_correlation(f, -f) == pytest.approx(-1.0)
    assert metrics.cross_correlation(f, 3.0 * f + 2.0) == pytest.approx(1.0)
    with pytest.raises(UndefinedCorrelationError):
        metrics.cross_correlation(f, np.ones_like(f))
    with pytest.raises(ValueError):
        metrics.cross_correlation(f, f[:-1])


def test_phase_error_wraps():
    assert metrics.phase_error(1j, 1.0) == pytest.approx(0.25)
    assert metrics.phase_error(np.exp(3.0j), np.exp(-3.0j)) == pytest.approx((2 * np.pi - 6.0) / (2 * np.pi))
    assert metrics.phase_error(-1.0, 1.0) == pytest.approx(0.5)


def test_offdiag_errors():
    ideal = fs.dm(fs.superposition(4, [0, 2], [1.0, 1.0]))
    fit = 0.9 * ideal + 0.1 * np.eye(4) / 4
    rep = metrics.offdiag_errors(fit, ideal, 2)
    assert rep.amp_error_0l == pytest.approx(0.05)
    assert rep.phase_error_0l == pytest.approx(0.0)
    assert rep.max() == pytest.approx(0.05)
    assert set(rep.as_dict()) == {"fidelity_error", "amp_error_0l", "phase_error_0l"}
    with pytest.raises(ValueError):
        metrics.offdiag_errors(fit, ideal, 4)


def test_fidelity_monotone_under_depolarizing(rng):
    rho = random_density_matrix(rng, 5, rank=1)
    ref = random_density_matrix(rng, 5, rank=2)
    target = np.eye(5) / 5
    f = [metrics.fidelity((1 - p) * rho + p * target, target) for p in np.linspace(0, 1, 11)]
    assert all(b >= a - 1e-12 for a, b in zip(f, f[1:]))
    assert metrics.fidelity(ref, rho) == pytest.approx(metrics.fidelity(rho, ref), abs=1e-9)
