"""Wigner maps from displaced-parity measurements and purity from grids.

The tomography pulse for grid point ``alpha`` is a gaussian targeting
``-alpha``: moving the state by ``-alpha`` puts phase-space point ``alpha``
at the origin, so a coherent state ``|b>`` peaks at grid point ``b``.
"""
import warnings
from dataclasses import dataclass

import numpy as np

from . import dynamics, kernels
from .dynamics import DEFAULT_STEP, GUARD_LEVELS, SystemParams
from .fockspace import (
    WIGNER_MAX,
    as_density_matrix,
    check_displacement_dim,
    dm,
    embed,
    parity_from_populations,
    wigner_exact,
)
from .parallel import map_ordered
from .readout import ReadoutConfig, sample_populations

MODES = ("exact", "pulsed", "pulsed+decoherence", "pulsed+decoherence+shot-noise")
BOUNDARY_TOL = 1e-3


class BoundaryMassWarning(UserWarning):
    """The Wigner function is not negligible on the edge of the grid."""


@dataclass(frozen=True)
class GridSpec:
    x_min: float = -2.5
    x_max: float = 2.5
    y_min: float = -2.5
    y_max: float = 2.5
    nx: int = 61
    ny: int = 61

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid needs at least 2 nodes per axis")
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError("grid bounds must satisfy max > min")

    @classmethod
    def square(cls, radius, n):
        return cls(-radius, radius, -radius, radius, n, n)

    @property
    def x(self):
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def y(self):
        return np.linspace(self.y_min, self.y_max, self.ny)

    @property
    def cell_area(self):
        return (self.x_max - self.x_min) / (self.nx - 1) * (self.y_max - self.y_min) / (self.ny - 1)

    def alphas(self):
        """Complex node coordinates, shape ``(nx, ny)``."""
        return self.x[:, None] + 1j * self.y[None, :]


@dataclass(frozen=True)
class WignerGrid:
    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.spec.nx, self.spec.ny):
            raise ValueError(f"values shape {v.shape} does not match grid {(self.spec.nx, self.spec.ny)}")
        if np.max(np.abs(v)) > 0.7:
            warnings.warn(f"|W| reaches {np.max(np.abs(v)):.3f} > 0.7", RuntimeWarning, stacklevel=3)
        object.__setattr__(self, "values", v)

    def integral(self):
        return float(np.sum(self.values) * self.spec.cell_area)

    def boundary_max(self):
        v = self.values
        return float(max(np.abs(v[0]).max(), np.abs(v[-1]).max(), np.abs(v[:, 0]).max(), np.abs(v[:, -1]).max()))


def purity_from_grid(grid):
    """State purity ``pi * integral |W|^2`` as a Riemann sum over the grid nodes."""
    if grid.boundary_max() > BOUNDARY_TOL:
        warnings.warn(
            f"Wigner function reaches {grid.boundary_max():.2g} on the grid boundary; purity is underestimated",
            BoundaryMassWarning,
            stacklevel=2,
        )
    return float(np.pi * np.sum(grid.values**2) * grid.spec.cell_area)


def _as_rho(rho0, dim):
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.ndim == 1:
        rho0 = dm(rho0)
    rho0 = as_density_matrix(rho0)
    if rho0.shape[0] < dim:
        rho0 = embed(rho0, dim)
    elif rho0.shape[0] > dim:
        raise ValueError(f"state has {rho0.shape[0]} levels but the simulation uses {dim}")
    return rho0


class PulsedTomography:
    """Displaced-parity measurements made with gaussian tomography pulses.

    Pulses of equal ``|alpha|`` share their step unitaries: a pulse of phase
    ``phi`` equals ``R U R^dag`` with ``R = exp(i phi n)``, and both the
    anharmonic term and the decoherence channel commute with ``R``, so the
    state is rotated by ``R^dag`` instead and the populations are unchanged.
    """

    def __init__(self, params, pulse_fwhm=1.6, cutoff=None, step=DEFAULT_STEP, decoherence=False, check_guard=True):
        self.params = params
        self.pulse_fwhm = pulse_fwhm
        self.cutoff = 2.0 * pulse_fwhm if cutoff is None else cutoff
        self.step = step
        self.decoherence = decoherence and params.decoherent
        self.check_guard = check_guard
        self._unit = dynamics.gaussian_envelope(1.0, pulse_fwhm, step, self.cutoff)
        n = np.arange(params.dim)
        self._n = n
        if self.decoherence:
            self._damp = dynamics.decoherence_factors(params.dim, step, params.t1, params.t2)

    @property
    def duration(self):
        return self._unit.duration

    def envelope(self, alpha):
        """Pulse measuring grid point ``alpha`` (harmonic displacement ``-alpha``)."""
        return self._unit.scaled(-complex(alpha))

    def _radial_steps(self, r):
        env = self._unit.scaled(-r)
        uniq, inv = np.unique(env.samples, return_inverse=True)
        us = dynamics.step_unitaries(uniq, np.full(uniq.size, self.step), self.params.beta, self.params.dim)
        return us, inv.astype(np.int64).ravel()

    def radial_unitary(self, r):
        us, inv = self._radial_steps(r)
        total = np.eye(self.params.dim, dtype=complex)
        for k in inv:
            total = us[k] @ total
        return total

    def populations(self, rho0, alphas):
        """Populations after each tomography pulse; shape ``(len(alphas), dim)``."""
        rho0 = _as_rho(rho0, self.params.dim)
        alphas = np.atleast_1d(np.asarray(alphas, dtype=complex)).ravel()
        radii, inv = np.unique(np.round(np.abs(alphas), 12), return_inverse=True)
        inv = inv.ravel()
        groups = [np.flatnonzero(inv == i) for i in range(radii.size)]
        out = np.empty((alphas.size, self.params.dim))

        def work(i):
            return self._group(rho0, radii[i], alphas[groups[i]])

        for i, pops in enumerate(map_ordered(work, range(radii.size))):
            out[groups[i]] = pops
        return out

    def _group(self, rho0, r, alphas):
        phases = np.angle(alphas)
        rots = np.exp(-1j * phases[:, None] * self._n)
        rho_rot = rots[:, :, None] * rho0[None] * rots[:, None, :].conj()
        if not self.decoherence:
            u = self.radial_unitary(r)
            pops = np.einsum("nj,pjk,nk->pn", u, rho_rot, u.conj(), optimize=True).real
            if self.check_guard:
                dynamics._check_guard(np.max(pops[:, -GUARD_LEVELS:].sum(-1)), True)
            return pops
        us, inv = self._radial_steps(r)
        keep, jump, dephase = self._damp
        pops = np.empty((alphas.size, self.params.dim))
        empty = np.zeros(0, dtype=np.int64)
        for j in range(alphas.size):
            rho, guard, _ = kernels.evolve_density(rho_rot[j], us, inv, keep, jump, dephase, True, GUARD_LEVELS, empty)
            dynamics._check_guard(guard, self.check_guard)
            pops[j] = np.real(np.diagonal(rho))
        return pops


def wigner_point_pulsed(rho0, alpha, params, pulse_fwhm=1.6, noise=None, rng=None, cutoff=None,
                        step=DEFAULT_STEP, decoherence=True):
    """One displaced-parity Wigner sample measured with a gaussian pulse.

    ``noise`` is an optional :class:`ReadoutConfig`; with it the populations
    are shot-noise sampled and the parity sum runs over ``noise.levels``.
    """
    check_displacement_dim(alpha, params.dim)
    tomo = PulsedTomography(params, pulse_fwhm, cutoff, step, decoherence)
    pops = tomo.populations(rho0, [alpha])[0]
    if noise is not None:
        rng = np.random.default_rng() if rng is None else rng
        pops = sample_populations(pops, noise.repetitions, rng, noise.method)[: noise.levels]
    return float(parity_from_populations(pops))


def wigner_map(rho0, spec, mode="exact", params=None, seed=0, pulse_fwhm=1.6, cutoff=None,
               noise=None, step=DEFAULT_STEP):
    """Wigner grid of ``rho0`` measured in one of :data:`MODES`.

    Shot-noise draws for node ``(ix, iy)`` come from a generator seeded with
    ``(seed, ix, iy)``, so maps are reproducible and order independent.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if mode == "exact":
        rho = np.asarray(rho0, dtype=complex)
        return wigner_exact(dm(rho) if rho.ndim == 1 else rho, spec)
    if params is None:
        raise ValueError(f"mode {mode!r} needs system parameters")
    alphas = spec.alphas()
    check_displacement_dim(alphas, params.dim)
    decoherence = mode != "pulsed"
    tomo = PulsedTomography(params, pulse_fwhm, cutoff, step, decoherence)
    pops = tomo.populations(rho0, alphas.ravel()).reshape(spec.nx, spec.ny, params.dim)
    if mode.endswith("shot-noise"):
        noise = ReadoutConfig() if noise is None else noise
        noisy = np.empty((spec.nx, spec.ny, noise.levels))
        for ix in range(spec.nx):
            for iy in range(spec.ny):
                rng = np.random.default_rng([seed, ix, iy])
                noisy[ix, iy] = sample_populations(pops[ix, iy], noise.repetitions, rng, noise.method)[: noise.levels]
        pops = noisy
    return WignerGrid(spec, parity_from_populations(pops))


def rotate_state(rho, angle):
    """Rotate a state in phase space: ``W'(alpha) = W(alpha e^{-i angle})``."""
    rho = np.asarray(rho, dtype=complex)
    r = np.exp(1j * angle * np.arange(rho.shape[0]))
    return r[:, None] * rho * r[None, :].conj()


def default_params():
    return SystemParams.from_mhz(20.0, dim=40)
