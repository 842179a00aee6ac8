import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from wigner_lab import dynamics as dyn
from wigner_lab import fockspace as fs
from wigner_lab.errors import InvalidDimensionError, StepSizeError, TruncationError


def generator(omega, beta, dim):
    a = fs.annihilation(dim)
    n = np.diag(np.arange(dim, dtype=float))
    return 0.5 * (1j * omega * a.conj().T - 1j * np.conj(omega) * a) + 0.5 * beta * n @ (n - np.eye(dim))


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 5), st.floats(-np.pi, np.pi), st.floats(-1, 1), st.floats(0.001, 0.5))
def test_step_unitary_matches_expm(r, phi, beta, tau):
    omega = r * np.exp(1j * phi)
    u = dyn.step_unitaries([omega], [tau], beta, 8)[0]
    ref = expm(1j * tau * generator(omega, beta, 8))
    assert np.allclose(u, ref, atol=1e-10)


def test_harmonic_pulse_is_displacement():
    alpha = 0.9 - 0.4j
    params = dyn.SystemParams(0.0, 40)
    env = dyn.gaussian_envelope(alpha)
    assert env.displacement() == pytest.approx(alpha, abs=1e-12)
    u = dyn.pulse_unitary(env, params)
    d = fs.displacement(alpha, 40)
    assert np.allclose(u[:20, :8], d[:20, :8], atol=1e-9)


def test_two_level_rabi_oscillation():
    omega = 2.0
    params = dyn.SystemParams(0.0, 2)
    times = np.linspace(0.0, 3.0, 7)
    env = dyn.PulseEnvelope(np.full(300, omega), 0.01)
    _, traj = dyn.propagate_state(fs.basis(2, 0), env, params, record_times=times, check_guard=False)
    p1 = np.array([abs(s[1]) ** 2 for s in traj])
    assert np.allclose(p1, np.sin(omega * times / 2.0) ** 2, atol=1e-12)


def test_ket_and_density_paths_agree():
    params = dyn.SystemParams.from_mhz(20.0, 20)
    psi0 = fs.superposition(20, [0, 1], [1.0, 1j])
    env = dyn.gaussian_envelope(0.8 + 0.3j)
    psi = dyn.propagate_state(psi0, env, params)
    rho = dyn.propagate(fs.dm(psi0), env, params)
    assert np.allclose(rho, np.outer(psi, psi.conj()), atol=1e-12)
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)


def test_record_times_match_truncated_runs():
    params = dyn.SystemParams.from_mhz(20.0, 20, t1=200.0, t2=300.0)
    env = dyn.gaussian_envelope(1.0, cutoff=4.0)
    rec = [0.0, 1.0, 2.5, 4.0]
    final, traj = dyn.propagate(fs.dm(fs.basis(20, 0)), env, params, record_times=rec)
    assert np.allclose(traj[0], fs.dm(fs.basis(20, 0)))
    assert np.allclose(traj[-1], final)
    part = dyn.PulseEnvelope(dyn.resample(env, 0.01).samples[:250], 0.01)
    assert np.allclose(traj[2], dyn.propagate(fs.dm(fs.basis(20, 0)), part, params), atol=1e-12)


def test_free_decay_of_excited_state():
    t1, dt, n = 100.0, 0.1, 500
    params = dyn.SystemParams(0.0, 4, t1=t1)
    rho = dyn.propagate(fs.dm(fs.basis(4, 1)), dyn.zero_envelope(n * dt, dt), params, step=dt, check_guard=False)
    assert rho[1, 1].real == pytest.approx((1 - dt / t1) ** n, rel=1e-10)
    assert rho[1, 1].real == pytest.approx(np.exp(-n * dt / t1), rel=1e-3)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)


def test_coherence_decay_rate():
    t1, t2, dt, n = 150.0, 200.0, 0.1, 400
    params = dyn.SystemParams(0.0, 4, t1=t1, t2=t2)
    psi = fs.superposition(4, [0, 1], [1.0, 1.0])
    rho = dyn.propagate(fs.dm(psi), dyn.zero_envelope(n * dt, dt), params, step=dt, check_guard=False)
    expect = 0.5 * (1 - dt / t1) ** (n / 2) * np.exp(-n * dt / (2 * t2))
    assert abs(rho[0, 1]) == pytest.approx(expect, rel=1e-10)


def test_decoherent_evolution_stays_physical(rng):
    params = dyn.SystemParams.from_mhz(30.0, 15, t1=50.0, t2=60.0)
    env = dyn.chirp_envelope(0.3, 0.1, -0.05, 10.0)
    rho = dyn.propagate(fs.dm(fs.basis(15, 0)), env, params)
    assert np.allclose(rho, rho.conj().T, atol=1e-12)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-10)
    assert np.linalg.eigvalsh(rho).min() > -1e-10
    assert np.trace(rho @ rho).real < 1.0


def test_decoherence_switch():
    params = dyn.SystemParams.from_mhz(20.0, 15, t1=30.0, t2=30.0)
    env = dyn.gaussian_envelope(0.5)
    off = dyn.propagate(fs.dm(fs.basis(15, 0)), env, params, decoherence=False)
    ref = dyn.propagate(fs.dm(fs.basis(15, 0)), env, params.coherent())
    assert np.allclose(off, ref)


def test_truncation_guard():
    params = dyn.SystemParams.from_mhz(0.0, 6)
    with pytest.raises(TruncationError):
        dyn.propagate_state(fs.basis(6, 0), dyn.gaussian_envelope(2.0), params)
    psi = dyn.propagate_state(fs.basis(6, 0), dyn.gaussian_envelope(2.0), params, check_guard=False)
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)


def test_step_size_limits():
    with pytest.raises(StepSizeError):
        dyn.decoherence_factors(5, 1.0, 20.0, None)
    with pytest.raises(StepSizeError):
        dyn.decoherence_factors(5, 1.0, None, 20.0)


def test_dimension_mismatch():
    params = dyn.SystemParams(0.1, 10)
    with pytest.raises(InvalidDimensionError):
        dyn.propagate_state(fs.basis(8, 0), dyn.gaussian_envelope(0.1), params)
    with pytest.raises(InvalidDimensionError):
        dyn.SystemParams(0.1, 1)


def test_envelopes():
    env = dyn.gaussian_envelope(1.0 + 1.0j, fwhm=2.0, dt=0.05)
    assert env.duration == pytest.approx(4.0)
    assert np.argmax(np.abs(env.samples)) in (env.samples.size // 2 - 1, env.samples.size // 2)
    with pytest.raises(ValueError):
        dyn.gaussian_envelope(1.0, fwhm=2.0, cutoff=3.0)
    ch = dyn.chirp_envelope(0.4, 0.3, -0.1, 5.0)
    assert np.allclose(np.abs(ch.samples), 0.4)
    assert ch.carrier_detuning_phase[-1] == pytest.approx(2 * np.pi * 0.5 * (0.3 - 0.1) * 5.0)
    rs = dyn.resample(dyn.PulseEnvelope([1.0, 2.0], 0.5), 0.1)
    assert np.allclose(rs.samples, [1.0] * 5 + [2.0] * 5)
    joined = dyn.concatenate(dyn.PulseEnvelope([1.0], 0.1), dyn.PulseEnvelope([2.0], 0.2))
    assert np.allclose(joined.samples, [1.0, 2.0, 2.0])


def test_free_propagator_undoes_free_rotation():
    beta, dt = 0.3, 2.0
    params = dyn.SystemParams(beta, 6)
    psi0 = fs.superposition(6, [0, 1, 2, 3], [1, 1, 1, 1])
    psi = dyn.propagate_state(psi0, dyn.zero_envelope(dt), params, check_guard=False)
    assert np.allclose(dyn.free_propagator(beta, dt, 6) @ psi, psi0, atol=1e-12)


def test_harmonic_limit_parameter():
    assert dyn.harmonic_limit_parameter(1.0, 3.2, 0.1, 2) == pytest.approx(0.32)


def test_amplitude_damping_coherence_oracle():
    t1, dt, n = 100.0, 0.05, 2000
    params = dyn.SystemParams(0.0, 4, t1=t1)
    rho0 = fs.dm(fs.superposition(4, [0, 1], [1.0, 1.0]))
    rho = dyn.propagate(rho0, dyn.zero_envelope(n * dt, dt), params, step=dt, check_guard=False)
    assert abs(rho[0, 1]) == pytest.approx(0.5 * np.exp(-n * dt / (2 * t1)), abs=1e-3)


def test_unitary_limit_conserves_purity(rng):
    params = dyn.SystemParams.from_mhz(30.0, 12)
    g = rng.normal(size=(12, 3)) + 1j * rng.normal(size=(12, 3))
    g[9:] = 0
    rho0 = g @ g.conj().T
    rho0 /= np.trace(rho0).real
    rho = dyn.propagate(rho0, dyn.chirp_envelope(0.2, 0.1, -0.1, 8.0), params)
    assert fs.purity(rho) == pytest.approx(fs.purity(rho0), abs=1e-9)
