"""Time-stepped propagation of a driven anharmonic oscillator.

Units: time in ns, angular frequencies and Rabi amplitudes in rad/ns.
Frequencies given in MHz/GHz are converted with :func:`mhz_to_rad_per_ns`
and :func:`ghz_to_rad_per_ns`.

The rotating-frame step generator is::

    U(dt) = exp(i dt/2 [ (i Omega a^dag - i Omega^* a) + beta n(n-1) ])

so that in the harmonic limit a pulse realizes ``D(alpha)`` with
``alpha = -(1/2) * integral(Omega dt)``.
"""
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import InvalidDimensionError, StepSizeError, TruncationError
from .fockspace import as_density_matrix, as_pure_state, dm

DEFAULT_STEP = 0.01
GUARD_LEVELS = 2
GUARD_TOL = 1e-3
_FWHM_TO_SIGMA = 1.0 / (2.0 * np.sqrt(2.0 * np.log(2.0)))


def mhz_to_rad_per_ns(f_mhz):
    return 2.0 * np.pi * f_mhz * 1e-3


def ghz_to_rad_per_ns(f_ghz):
    return 2.0 * np.pi * f_ghz


@dataclass(frozen=True)
class SystemParams:
    """Oscillator parameters: anharmonicity ``beta`` (rad/ns), truncation, T1/T2 (ns)."""

    beta: float
    dim: int = 15
    t1: Optional[float] = None
    t2: Optional[float] = None

    def __post_init__(self):
        if self.dim < 2:
            raise InvalidDimensionError(f"dim must be >= 2, got {self.dim}")
        for name in ("t1", "t2"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValueError(f"{name} must be positive, got {v}")

    @classmethod
    def from_mhz(cls, beta_mhz, dim=15, t1=None, t2=None):
        return cls(mhz_to_rad_per_ns(beta_mhz), dim, t1, t2)

    @property
    def decoherent(self):
        return self.t1 is not None or self.t2 is not None

    def coherent(self):
        """Copy of these parameters with decoherence switched off."""
        return SystemParams(self.beta, self.dim)

    def with_dim(self, dim):
        return SystemParams(self.beta, dim, self.t1, self.t2)


@dataclass(frozen=True)
class PulseEnvelope:
    """Complex Rabi amplitudes (rad/ns) held constant over consecutive ``dt`` slots.

    ``carrier_detuning_phase[k]``, when present, is the detuning phase
    accumulated by the end of slot ``k``.
    """

    samples: np.ndarray
    dt: float
    carrier_detuning_phase: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        s = np.atleast_1d(np.asarray(self.samples, dtype=complex))
        if s.ndim != 1 or s.size < 1:
            raise ValueError("envelope needs at least one sample")
        if not np.all(np.isfinite(s)):
            raise ValueError("envelope samples must be finite")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        object.__setattr__(self, "samples", s)

    @property
    def duration(self):
        return self.samples.size * self.dt

    @property
    def times(self):
        """Slot midpoints."""
        return (np.arange(self.samples.size) + 0.5) * self.dt

    def area(self):
        return complex(np.sum(self.samples) * self.dt)

    def displacement(self):
        """Harmonic-limit displacement ``-(1/2) * integral(Omega dt)``."""
        return -0.5 * self.area()

    def rotated(self, phase):
        """Envelope with every sample multiplied by ``exp(i phase)``."""
        return PulseEnvelope(self.samples * np.exp(1j * phase), self.dt, self.carrier_detuning_phase)

    def scaled(self, factor):
        return PulseEnvelope(self.samples * factor, self.dt, self.carrier_detuning_phase)


def gaussian_envelope(alpha_target, fwhm=1.6, dt=DEFAULT_STEP, cutoff=None):
    """Gaussian pulse whose harmonic displacement is exactly ``alpha_target``.

    The pulse occupies a window of length ``cutoff`` (default ``2 * fwhm``)
    centred on the gaussian peak.
    """
    if not fwhm > 0:
        raise ValueError("fwhm must be positive")
    if cutoff is None:
        cutoff = 2.0 * fwhm
    if cutoff < 2.0 * fwhm - 1e-12:
        raise ValueError(f"cutoff {cutoff} shorter than 2*fwhm = {2 * fwhm}")
    n = max(1, int(round(cutoff / dt)))
    t = (np.arange(n) + 0.5) * dt
    sigma = fwhm * _FWHM_TO_SIGMA
    g = np.exp(-0.5 * ((t - 0.5 * n * dt) / sigma) ** 2)
    scale = -2.0 * complex(alpha_target) / (g.sum() * dt)
    return PulseEnvelope(scale * g, dt)


def chirp_envelope(rabi, f_start_detuning, f_end_detuning, duration, dt=DEFAULT_STEP):
    """Constant-amplitude linear chirp in the frame rotating at f01.

    Detunings are in GHz. The drive at ``f01 + df(t)`` appears in this frame
    as ``rabi * exp(-i theta(t))`` with ``theta = 2 pi integral(df)``.
    """
    if not duration > 0:
        raise ValueError("duration must be positive")
    n = max(1, int(round(duration / dt)))
    total = n * dt

    def theta(t):
        rate = (f_end_detuning - f_start_detuning) / total
        return 2.0 * np.pi * (f_start_detuning * t + 0.5 * rate * t * t)

    mid = (np.arange(n) + 0.5) * dt
    ends = (np.arange(n) + 1.0) * dt
    return PulseEnvelope(rabi * np.exp(-1j * theta(mid)), dt, carrier_detuning_phase=theta(ends))


def zero_envelope(duration, dt=DEFAULT_STEP):
    return PulseEnvelope(np.zeros(max(1, int(round(duration / dt)))), dt)


def concatenate(*envs, dt=None):
    """Join envelopes; all must share ``dt`` (or be resampled to ``dt`` first)."""
    dt = envs[0].dt if dt is None else dt
    parts = []
    for e in envs:
        if not np.isclose(e.dt, dt):
            e = resample(e, dt)
        parts.append(e.samples)
    return PulseEnvelope(np.concatenate(parts), dt)


def resample(env, step):
    """Piecewise-constant (sample-and-hold) resampling onto a ``step`` grid."""
    nsteps = max(1, int(round(env.duration / step)))
    ratio = env.dt / step
    if abs(ratio - round(ratio)) < 1e-9 and round(ratio) >= 1:
        samples = np.repeat(env.samples, int(round(ratio)))[:nsteps]
    else:
        src = np.minimum(((np.arange(nsteps) + 0.5) * step / env.dt).astype(int), env.samples.size - 1)
        samples = env.samples[src]
    return PulseEnvelope(samples, step)


def step_unitaries(values, durations, beta, dim):
    """``exp(i tau_k H(Omega_k))`` for each (Omega_k, tau_k) pair.

    ``H(Omega) = (1/2)(i Omega a^dag - i Omega^* a) + (beta/2) n(n-1)`` is
    ``T K T^dag`` with ``K = (|Omega|/2)(a + a^dag) + (beta/2) n(n-1)`` real
    symmetric and ``T = diag(exp(i (arg(Omega) + pi/2) n))``, so each step
    needs only a real symmetric eigendecomposition.
    """
    values = np.asarray(values, dtype=complex).ravel()
    n = np.arange(dim)
    off = np.sqrt(np.arange(1, dim))
    k = np.zeros((values.size, dim, dim))
    k[:, n, n] = 0.5 * beta * n * (n - 1)
    k[:, n[:-1], n[1:]] = 0.5 * np.abs(values)[:, None] * off
    k[:, n[1:], n[:-1]] = k[:, n[:-1], n[1:]]
    w, v = np.linalg.eigh(k)
    ph = np.exp(1j * np.asarray(durations, dtype=float).ravel()[:, None] * w)
    u = (v * ph[:, None, :]) @ v.transpose(0, 2, 1)
    t = np.exp(1j * (np.angle(values) + 0.5 * np.pi)[:, None] * n)
    return t[:, :, None] * u * t[:, None, :].conj()


def free_propagator(beta, delta_t, dim):
    """Diagonal ``exp(-i beta n(n-1)/2 delta_t)``: undoes drive-free rotation over ``delta_t``."""
    if dim < 2:
        raise InvalidDimensionError(f"dim must be >= 2, got {dim}")
    n = np.arange(dim)
    return np.diag(np.exp(-0.5j * beta * n * (n - 1) * delta_t))


def decoherence_factors(dim, dt, t1, t2):
    """Kraus weights for one step: no-jump ``keep``, jump ``n -> n-1`` and dephasing mask."""
    n = np.arange(dim)
    if t1 is not None:
        if dt > t1 / 50.0:
            raise StepSizeError(f"dt = {dt} ns exceeds t1/50 = {t1 / 50.0} ns")
        p = n * dt / t1
        if p[-1] > 1.0:
            raise StepSizeError(f"decay probability {p[-1]:.3g} > 1 on the top level; reduce dt")
        keep = np.sqrt(1.0 - p)
        jump = np.sqrt(p)
    else:
        keep = np.ones(dim)
        jump = np.zeros(dim)
    if t2 is not None:
        if dt > t2 / 50.0:
            raise StepSizeError(f"dt = {dt} ns exceeds t2/50 = {t2 / 50.0} ns")
        diff = n[:, None] - n[None, :]
        dephase = np.exp(-(diff**2) * dt / (2.0 * t2))
    else:
        dephase = np.ones((dim, dim))
    return keep, jump, dephase


def decoherence_step(rho, dt, t1=None, t2=None):
    """One CPTP step of multilevel amplitude damping followed by pure dephasing."""
    rho = np.asarray(rho, dtype=complex)
    keep, jump, dephase = decoherence_factors(rho.shape[0], dt, t1, t2)
    out = np.outer(keep, keep) * rho
    out[:-1, :-1] += np.outer(jump[1:], jump[1:]) * rho[1:, 1:]
    return out * dephase


def _plan(env, step, record_times):
    """Resampled step amplitudes, their unique values, and record step counts."""
    env = resample(env, step) if not np.isclose(env.dt, step) else env
    nsteps = env.samples.size
    uniq, inv = np.unique(env.samples, return_inverse=True)
    if record_times is None:
        record = np.zeros(0, dtype=np.int64)
    else:
        record = np.rint(np.asarray(record_times, dtype=float) / step).astype(np.int64)
        if np.any(record < 0) or np.any(record > nsteps):
            raise ValueError("record times must lie inside the envelope duration")
        if np.any(np.diff(record) < 0):
            raise ValueError("record times must be sorted")
    return uniq, inv.astype(np.int64).ravel(), record, nsteps


def _runs(inv, record):
    """Merge consecutive identical steps; never merge across a record point."""
    n = inv.size
    brk = np.zeros(n + 1, dtype=bool)
    brk[0] = brk[n] = True
    brk[1:n] = inv[1:] != inv[:-1]
    rec = np.asarray(record, dtype=np.int64)
    brk[rec[(rec > 0) & (rec < n)]] = True
    bounds = np.flatnonzero(brk)
    starts, ends = bounds[:-1], bounds[1:]
    return inv[starts].astype(np.int64), ends - starts, ends.astype(np.int64)


def _check_guard(guard, check):
    if check and guard > GUARD_TOL:
        raise TruncationError(
            f"population {guard:.3g} reached the top {GUARD_LEVELS} levels (limit {GUARD_TOL}); increase dim"
        )


def propagate_state(psi0, env, params, step=DEFAULT_STEP, record_times=None, check_guard=True):
    """Coherent propagation of a pure state; decoherence settings are ignored.

    Returns the final state, or ``(final, trajectory)`` when ``record_times``
    is given.
    """
    psi0 = as_pure_state(psi0)
    if psi0.size != params.dim:
        raise InvalidDimensionError(f"state has {psi0.size} levels, params.dim = {params.dim}")
    uniq, inv, record, _ = _plan(env, step, record_times)
    run_idx, run_len, run_end = _runs(inv, record)
    pairs, pair_inv = np.unique(np.stack([run_idx, run_len]), axis=1, return_inverse=True)
    us = step_unitaries(uniq[pairs[0]], pairs[1] * step, params.beta, params.dim)
    # record positions are expressed in runs
    run_record = np.searchsorted(run_end, record, side="left") + 1
    run_record[record == 0] = 0
    psi, guard, snaps = kernels.evolve_ket(psi0, us, np.ravel(pair_inv).astype(np.int64), GUARD_LEVELS, run_record)
    _check_guard(guard, check_guard)
    if record_times is None:
        return psi
    return psi, list(snaps)


def propagate(rho0, env, params, step=DEFAULT_STEP, record_times=None, decoherence=True, check_guard=True):
    """Propagate a density matrix through ``env``.

    Each ``step`` applies ``rho -> U rho U^dag`` and, when ``params`` carries
    T1/T2 and ``decoherence`` is on, one :func:`decoherence_step`.
    Returns the final matrix, or ``(final, trajectory)`` with ``record_times``.
    """
    rho0 = as_density_matrix(rho0)
    if rho0.shape[0] != params.dim:
        raise InvalidDimensionError(f"rho has {rho0.shape[0]} levels, params.dim = {params.dim}")
    decohere = decoherence and params.decoherent
    uniq, inv, record, _ = _plan(env, step, record_times)
    if not decohere:
        run_idx, run_len, run_end = _runs(inv, record)
        pairs, pair_inv = np.unique(np.stack([run_idx, run_len]), axis=1, return_inverse=True)
        us = step_unitaries(uniq[pairs[0]], pairs[1] * step, params.beta, params.dim)
        index = np.ravel(pair_inv).astype(np.int64)
        run_record = np.searchsorted(run_end, record, side="left") + 1
        run_record[record == 0] = 0
        record = run_record
        keep, jump, dephase = np.ones(params.dim), np.zeros(params.dim), np.ones((params.dim, params.dim))
    else:
        us = step_unitaries(uniq, np.full(uniq.size, step), params.beta, params.dim)
        index = inv
        keep, jump, dephase = decoherence_factors(params.dim, step, params.t1, params.t2)
    rho, guard, snaps = kernels.evolve_density(
        rho0, us, index, keep, jump, dephase, decohere, GUARD_LEVELS, record
    )
    _check_guard(guard, check_guard)
    if record_times is None:
        return rho
    return rho, list(snaps)


def evolve(state, env, params, step=DEFAULT_STEP, decoherence=True, check_guard=True):
    """Propagate a ket or a density matrix; kets take the fast coherent path when possible."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        if decoherence and params.decoherent:
            return propagate(dm(state), env, params, step, decoherence=True, check_guard=check_guard)
        return propagate_state(state, env, params, step, check_guard=check_guard)
    return propagate(state, env, params, step, decoherence=decoherence, check_guard=check_guard)


def pulse_unitary(env, params, step=DEFAULT_STEP):
    """Full coherent propagator of ``env`` (product of all step unitaries)."""
    uniq, inv, record, _ = _plan(env, step, None)
    run_idx, run_len, _ = _runs(inv, record)
    us = step_unitaries(uniq[run_idx], run_len * step, params.beta, params.dim)
    total = np.eye(params.dim, dtype=complex)
    for u in us:
        total = u @ total
    return total


def harmonic_limit_parameter(alpha, duration, beta, m):
    """``|alpha| T beta m^2 / 4``; the pulse acts as a displacement when this is << 1."""
    return abs(alpha) * duration * abs(beta) * m * m / 4.0
