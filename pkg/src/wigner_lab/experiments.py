"""End-to-end simulations behind each figure and table.

Each function returns plain arrays or small dataclasses; the CLI turns them
into files.
"""
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from . import dmfit, dynamics
from .dynamics import DEFAULT_STEP, SystemParams
from .fockspace import (
    basis,
    check_displacement_dim,
    dm,
    fock_superposition,
    poisson_populations,
    purity,
    superposition,
    wigner_exact,
)
from .metrics import ErrorReport, cross_correlation, fidelity_error, offdiag_errors
from .readout import sample_populations
from .wigner import GridSpec, PulsedTomography, purity_from_grid, rotate_state, wigner_map


def zero_l_state(l, d=6):
    """``(|0> + |l>)/sqrt(2)`` on ``d`` levels."""
    return fock_superposition(d, l)


def flat_state(levels=5, d=6):
    """Equal superposition of the lowest ``levels`` Fock states."""
    return superposition(d, list(range(levels)))


# displacement sweep --------------------------------------------------------


def displace_sweep(params, alphas, fwhm=1.6, step=DEFAULT_STEP, cutoff=None, levels=13):
    """Populations after a gaussian pulse of target ``alpha`` from ``|0>``.

    Returns ``(pulsed, poisson)``, both of shape ``(len(alphas), levels)``.
    """
    alphas = np.atleast_1d(np.asarray(alphas, dtype=complex))
    check_displacement_dim(alphas, params.dim)
    psi0 = basis(params.dim, 0)
    pulsed = np.empty((alphas.size, levels))
    poisson = np.empty((alphas.size, levels))
    for i, a in enumerate(alphas):
        env = dynamics.gaussian_envelope(a, fwhm, step, cutoff)
        psi = dynamics.propagate_state(psi0, env, params, step)
        pulsed[i] = np.abs(psi[:levels]) ** 2
        poisson[i] = poisson_populations(abs(a), levels)
    return pulsed, poisson


def population_variance(p):
    p = np.asarray(p, dtype=float)
    n = np.arange(p.shape[-1])
    mean = p @ n / p.sum(-1)
    return p @ n**2 / p.sum(-1) - mean**2


# density-matrix tomography -------------------------------------------------


@dataclass
class TomographyResult:
    rho_fit: np.ndarray
    rho_raw: np.ndarray
    rho_ideal: np.ndarray
    errors: Optional[ErrorReport]
    fidelity_error: float
    alphas: np.ndarray
    populations: np.ndarray
    phase_dt: float


def _ideal(state, d):
    state = np.asarray(state, dtype=complex)
    rho = dm(state) if state.ndim == 1 else state
    rho = rho[:d, :d]
    return rho / np.trace(rho).real


def tomography_pipeline(state, params, fit_cfg=None, rng=None, seed=0, pulse_fwhm=1.6, cutoff=None,
                        step=DEFAULT_STEP, decoherence=False, repetitions=None, phase_dt=None, l=None):
    """Pulsed-displacement tomography of ``state`` followed by the density-matrix fit.

    ``state`` is a ket or density matrix; the reference for the error
    measures is its (renormalized) restriction to the fit subspace.
    ``phase_dt`` is the free evolution undone after the fit; by default the
    time from the pulse centre to its end (half the pulse window).
    """
    fit_cfg = dmfit.FitConfig() if fit_cfg is None else fit_cfg
    rng = np.random.default_rng(seed) if rng is None else rng
    d = fit_cfg.d
    alphas = dmfit.sample_displacements(fit_cfg, rng)
    tomo = PulsedTomography(params, pulse_fwhm, cutoff, step, decoherence)
    pops = tomo.populations(state, alphas)
    if repetitions is not None:
        pops = sample_populations(pops, repetitions, rng)
    fitter = dmfit.LinearFitter(alphas, fit_cfg)
    raw = fitter.raw(pops[:, :d])
    dt = 0.5 * tomo.duration if phase_dt is None else phase_dt
    raw = dmfit.phase_correct(raw, params.beta, dt)
    rho = dmfit.project_physical(raw, fit_cfg.projection)
    ideal = _ideal(state, d)
    errors = offdiag_errors(rho, ideal, l) if l is not None else None
    return TomographyResult(rho, raw, ideal, errors, fidelity_error(rho, ideal), alphas, pops, dt)


def fock_superposition_errors(levels, params, fit_cfg=None, seed=0, decoherence=False, **kw):
    """Error reports for ``(|0> + |l>)/sqrt(2)``, one per ``l`` in ``levels``."""
    fit_cfg = dmfit.FitConfig() if fit_cfg is None else fit_cfg
    out = {}
    for l in levels:
        res = tomography_pipeline(zero_l_state(l, fit_cfg.d), params, fit_cfg, seed=seed,
                                  decoherence=decoherence, l=l, **kw)
        out[l] = res
    return out


# anharmonicity sweep of the measured Wigner map ----------------------------


def correlation_deviation(psi, params, spec, pulse_fwhm=1.6, cutoff=None, step=DEFAULT_STEP):
    """``1 - C`` between the pulse-measured and the exact Wigner maps."""
    exact = wigner_exact(dm(psi), spec)
    measured = wigner_map(psi, spec, "pulsed", params, pulse_fwhm=pulse_fwhm, cutoff=cutoff, step=step)
    return 1.0 - cross_correlation(measured, exact)


def anharmonicity_sweep(psi, betas_mhz, spec, dim=30, **kw):
    return [(b, correlation_deviation(psi, SystemParams.from_mhz(b, dim), spec, **kw)) for b in betas_mhz]


def monotone_violations(values):
    """Number of adjacent pairs that decrease."""
    v = np.asarray(values, dtype=float)
    return int(np.sum(np.diff(v) < 0))


# chirped drive and purity ---------------------------------------------------


@dataclass
class ChirpResult:
    times: np.ndarray
    purity: np.ndarray
    snapshot_times: np.ndarray
    grids: List
    grid_purity: np.ndarray
    snapshot_purity: np.ndarray
    frame_phase: np.ndarray
    t_min: float
    tau: float
    populations: np.ndarray


def frame_phase(env, t, f_end_ghz):
    """Drive-frame phase at times ``t``; after the pulse it advances at the final detuning."""
    theta = np.concatenate([[0.0], env.carrier_detuning_phase])
    ends = np.arange(theta.size) * env.dt
    t = np.asarray(t, dtype=float)
    inside = np.interp(np.minimum(t, ends[-1]), ends, theta)
    return inside + 2.0 * np.pi * f_end_ghz * np.clip(t - ends[-1], 0.0, None)


def fit_recovery_time(times, purities, t_from, t_to):
    """Time constant of ``1 - purity`` from a log-linear fit over ``[t_from, t_to]``."""
    times = np.asarray(times, dtype=float)
    y = 1.0 - np.asarray(purities, dtype=float)
    m = (times >= t_from - 1e-9) & (times <= t_to + 1e-9) & (y > 0)
    if m.sum() < 3:
        raise ValueError("need at least three points in the fit window")
    slope = np.polyfit(times[m], np.log(y[m]), 1)[0]
    if not slope < 0:
        raise ValueError("purity does not recover in the fit window")
    return -1.0 / slope


def chirp_experiment(params, rabi, f_start_ghz, f_end_ghz, duration, t_end, sample_every=5.0,
                     snapshots=(), spec=None, fit_delay=100.0, step=DEFAULT_STEP, free_step=0.1):
    """Chirp from ``|0>``, then free decay; purity on a time grid and Wigner snapshots.

    Snapshot grids are shown in the drive frame (axes rotated by the frame
    phase). ``tau`` is the recovery time of ``1 - purity`` fitted from
    ``fit_delay`` after the purity minimum to ``t_end``.
    """
    spec = GridSpec.square(4.0, 81) if spec is None else spec
    env = dynamics.chirp_envelope(rabi, f_start_ghz, f_end_ghz, duration, step)
    duration = env.duration
    snapshots = np.asarray(sorted(snapshots), dtype=float)
    times = np.union1d(np.arange(0.0, t_end + 1e-9, sample_every), snapshots)
    times = times[times <= t_end + 1e-9]
    during, after = times[times <= duration + 1e-9], times[times > duration + 1e-9]
    rho0 = dm(basis(params.dim, 0))
    rho_end, traj = dynamics.propagate(rho0, env, params, step, record_times=np.minimum(during, duration))
    if after.size:
        free = dynamics.zero_envelope(t_end - duration, free_step)
        _, traj2 = dynamics.propagate(rho_end, free, params, free_step, record_times=after - duration)
        traj = traj + traj2
    pur = np.array([purity(r) for r in traj])
    pops = np.array([np.real(np.diagonal(r)) for r in traj])
    phases = frame_phase(env, snapshots, f_end_ghz)
    grids, gp, sp = [], [], []
    for t, ph in zip(snapshots, phases):
        r = traj[int(np.flatnonzero(np.isclose(times, t))[0])]
        g = wigner_exact(rotate_state(r, -ph), spec)
        grids.append(g)
        gp.append(purity_from_grid(g))
        sp.append(purity(r))
    i_min = int(np.argmin(pur))
    t_min = float(times[i_min])
    try:
        tau = fit_recovery_time(times, pur, t_min + fit_delay, t_end)
    except ValueError:
        tau = float("nan")
    return ChirpResult(times, pur, snapshots, grids, np.array(gp), np.array(sp), phases, t_min, tau, pops)
