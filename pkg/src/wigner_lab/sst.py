"""Standard state tomography in an orthonormal operator basis.

Also holds the harness comparing the shot-noise efficiency of standard
tomography (SST) against Wigner tomography (WT).
"""
import dataclasses
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import dmfit
from .dynamics import SystemParams
from .fockspace import as_pure_state, displaced_populations, dm
from .metrics import fidelity
from .parallel import map_ordered
from .readout import sample_populations


@dataclass(frozen=True)
class OperatorBasis:
    d: int
    ops: np.ndarray

    def __len__(self):
        return self.ops.shape[0]

    def gram(self):
        return np.einsum("aij,bji->ab", self.ops, self.ops).real

    def expand(self, coeffs):
        """``sum_j c_j U_j``; ``coeffs`` may carry leading batch axes."""
        return np.tensordot(np.asarray(coeffs), self.ops, axes=([-1], [0]))


def su_basis(d):
    """Scaled identity plus generalized Gell-Mann matrices, trace-orthonormal.

    Order: ``I/sqrt(d)``, then for each pair ``j < k`` the symmetric and
    antisymmetric off-diagonal generators, then the ``d - 1`` diagonal ones.
    """
    if d < 2:
        raise ValueError("basis dimension must be >= 2")
    ops = [np.eye(d, dtype=complex) / np.sqrt(d)]
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 1.0 / np.sqrt(2.0)
            a = np.zeros((d, d), dtype=complex)
            a[j, k] = -1j / np.sqrt(2.0)
            a[k, j] = 1j / np.sqrt(2.0)
            ops += [s, a]
    for l in range(1, d):
        g = np.zeros((d, d), dtype=complex)
        g[np.arange(l), np.arange(l)] = 1.0
        g[l, l] = -l
        ops.append(g / np.sqrt(l * (l + 1)))
    return OperatorBasis(d, np.array(ops))


def measure_expectation(rho, op, repetitions, rng, method="cumulative", size=None):
    """Shot-noise estimate of ``Tr(rho op)``.

    The state is rotated into the eigenbasis of ``op`` and its populations
    are read out; the estimate is ``sum_n lambda_n P_hat(n)``.
    """
    op = np.asarray(op, dtype=complex)
    if np.max(np.abs(op - op.conj().T)) > 1e-10:
        raise ValueError("observable must be Hermitian")
    lam, v = np.linalg.eigh(op)
    rotated = v.conj().T @ np.asarray(rho, dtype=complex) @ v
    p = np.clip(np.real(np.diagonal(rotated)), 0.0, 1.0)
    return sample_populations(p, repetitions, rng, method, size) @ lam


def exact_expectations(rho, basis):
    return np.einsum("ij,aji->a", np.asarray(rho, dtype=complex), basis.ops).real


def sst_reconstruct(rho, basis, repetitions=None, rng=None, method="cumulative", project="simplex", size=None):
    """Reconstruct ``rho`` from (noisy) expectation values of ``basis``.

    ``repetitions=None`` uses exact expectations. ``size`` returns an
    ensemble of independent reconstructions. ``project`` names the
    physicality projection, or is ``None`` for the raw linear estimate.
    """
    rho = np.asarray(rho, dtype=complex)[: basis.d, : basis.d]
    if repetitions is None:
        coeffs = exact_expectations(rho, basis)
        if size is not None:
            coeffs = np.broadcast_to(coeffs, (size, len(basis)))
    else:
        coeffs = np.stack(
            [measure_expectation(rho, op, repetitions, rng, method, size) for op in basis.ops], axis=-1
        )
    raw = basis.expand(coeffs)
    return dmfit.project_physical(raw, project) if project else raw


@dataclass(frozen=True)
class WTConfig:
    """Wigner-tomography branch: fixed repetitions, varying number of pulses.

    Both branches default to the clip-and-rescale projection, whose fidelity
    error stays linear in the noise amplitude.
    """

    repetitions: int = 900
    n_pulses: Sequence[int] = (20, 30, 45, 68, 100, 150, 225, 340)
    fit: dmfit.FitConfig = field(default_factory=lambda: dmfit.FitConfig(projection="clip"))
    pulsed: bool = False
    params: Optional[SystemParams] = None
    pulse_fwhm: float = 1.6
    method: str = "cumulative"


@dataclass(frozen=True)
class SSTConfig:
    """SST branch: fixed ``d^2`` pulses, varying repetitions."""

    d: int = 6
    repetitions: Sequence[int] = (100, 170, 300, 500, 900, 1600, 3000)
    method: str = "cumulative"
    projection: str = "clip"


def _wt_populations(rho_ideal, alphas, cfg):
    if cfg.pulsed:
        from .wigner import PulsedTomography

        params = cfg.params if cfg.params is not None else SystemParams.from_mhz(20.0, dim=30)
        tomo = PulsedTomography(params, cfg.pulse_fwhm)
        return tomo.populations(rho_ideal, alphas)
    return displaced_populations(rho_ideal, -alphas, cfg.fit.model_dim)


def wt_fidelity_errors(psi, cfg, n_pulses, ensemble_size, rng):
    """Fidelity errors of ``ensemble_size`` Wigner reconstructions from ``n_pulses`` displacements."""
    d = cfg.fit.d
    rho_ideal = dm(psi[:d])
    fit_cfg = dataclasses.replace(cfg.fit, n_samples=n_pulses)
    alphas = dmfit.sample_displacements(fit_cfg, rng)
    pops = _wt_populations(rho_ideal, alphas, cfg)
    noisy = sample_populations(pops, cfg.repetitions, rng, cfg.method, size=ensemble_size)[..., :d]
    fits = dmfit.LinearFitter(alphas, fit_cfg).fit(noisy)
    return np.array([1.0 - fidelity(f, rho_ideal) for f in fits])


def sst_fidelity_errors(psi, cfg, repetitions, ensemble_size, rng):
    basis = su_basis(cfg.d)
    rho_ideal = dm(psi[: cfg.d])
    fits = sst_reconstruct(rho_ideal, basis, repetitions, rng, cfg.method, cfg.projection, ensemble_size)
    return np.array([1.0 - fidelity(f, rho_ideal) for f in fits])


def compare_wt_sst(state, wt_cfg=None, sst_cfg=None, ensemble_size=50, rng=None, seed=0):
    """Mean fidelity error versus total measurement budget ``N`` for both methods.

    ``N = R`` for SST and ``N = R * N_W / d^2`` for WT. Returns rows
    ``(method, N, mean_dF, std_dF)``.
    """
    wt_cfg = WTConfig() if wt_cfg is None else wt_cfg
    sst_cfg = SSTConfig(d=wt_cfg.fit.d) if sst_cfg is None else sst_cfg
    psi = as_pure_state(state)
    if np.linalg.norm(psi[wt_cfg.fit.d :]) > 1e-12:
        raise ValueError("state has support outside the fit subspace")
    if rng is not None:
        seed = int(rng.integers(2**31))
    n_sst = sst_cfg.d**2

    def wt_row(i):
        nw = wt_cfg.n_pulses[i]
        errs = wt_fidelity_errors(psi, wt_cfg, nw, ensemble_size, np.random.default_rng([seed, 0, i]))
        return ("WT", wt_cfg.repetitions * nw / n_sst, float(errs.mean()), float(errs.std(ddof=1)))

    def sst_row(i):
        r = sst_cfg.repetitions[i]
        errs = sst_fidelity_errors(psi, sst_cfg, r, ensemble_size, np.random.default_rng([seed, 1, i]))
        return ("SST", float(r), float(errs.mean()), float(errs.std(ddof=1)))

    rows = map_ordered(wt_row, range(len(wt_cfg.n_pulses)))
    rows += map_ordered(sst_row, range(len(sst_cfg.repetitions)))
    return rows


def loglog_fit(rows, method):
    """Least-squares line ``log dF = intercept + slope log N`` for one method."""
    n = np.array([r[1] for r in rows if r[0] == method], dtype=float)
    df = np.array([r[2] for r in rows if r[0] == method], dtype=float)
    slope, intercept = np.polyfit(np.log(n), np.log(df), 1)
    return float(slope), float(intercept)


def efficiency_ratio(rows, target=0.02):
    """``N_WT / N_SST`` needed to reach mean fidelity error ``target`` (fitted lines)."""
    out = {}
    for method in ("WT", "SST"):
        slope, intercept = loglog_fit(rows, method)
        out[method] = np.exp((np.log(target) - intercept) / slope)
    return float(out["WT"] / out["SST"])
