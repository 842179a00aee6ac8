"""Density-matrix reconstruction from populations of displaced states.

The forward model uses ideal displacement operators: for a sample taken at
phase-space point ``alpha`` the predicted populations are the lowest ``d``
diagonal entries of ``D(-alpha) rho D(-alpha)^dag``. The model is linear in
a real parametrization of Hermitian ``d x d`` matrices, so the fit is an
ordinary least-squares solve followed by a spectral projection onto the
physical states.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import free_propagator
from .errors import IdentifiabilityError, InvalidStateError
from .fockspace import displaced_populations, displacement, min_displacement_dim


PROJECTIONS = ("clip", "simplex")


@dataclass(frozen=True)
class FitConfig:
    d: int = 6
    n_samples: int = 200
    radius: float = 2.0
    regularization: float = 0.0
    dim: Optional[int] = None
    projection: str = "simplex"

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("fit dimension must be >= 2")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if self.regularization < 0:
            raise ValueError("regularization must be >= 0")
        if self.projection not in PROJECTIONS:
            raise ValueError(f"unknown projection {self.projection!r}; expected one of {PROJECTIONS}")

    @property
    def model_dim(self):
        """Fock dimension used by the forward model."""
        if self.dim is not None:
            return self.dim
        return self.d + min_displacement_dim(self.radius)


@dataclass(frozen=True)
class DisplacementSample:
    alpha: complex
    populations: np.ndarray


def sample_displacements(cfg, rng):
    """``cfg.n_samples`` points uniform (by area) over the disk ``|alpha| < radius``."""
    u = rng.random(cfg.n_samples)
    theta = rng.uniform(0.0, 2.0 * np.pi, cfg.n_samples)
    return cfg.radius * np.sqrt(u) * np.exp(1j * theta)


def predict_populations(rho, alpha, dim, d=None):
    """Lowest ``d`` populations of ``D(-alpha) rho D(-alpha)^dag`` (``rho`` embedded in ``dim``)."""
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0] if d is None else d
    return displaced_populations(rho, [-complex(alpha)], dim)[0, :d]


def n_params(d):
    return d * d


def to_params(h):
    """Real vector ``[diag, Re(upper), Im(upper)]`` of a Hermitian matrix."""
    h = np.asarray(h, dtype=complex)
    iu = np.triu_indices(h.shape[0], 1)
    return np.concatenate([np.real(np.diagonal(h)), h[iu].real, h[iu].imag])


def from_params(x, d):
    """Inverse of :func:`to_params`; ``x`` may carry leading batch axes."""
    x = np.asarray(x, dtype=float)
    iu = np.triu_indices(d, 1)
    m = iu[0].size
    h = np.zeros(x.shape[:-1] + (d, d), dtype=complex)
    idx = np.arange(d)
    h[..., idx, idx] = x[..., :d]
    upper = x[..., d : d + m] + 1j * x[..., d + m :]
    h[..., iu[0], iu[1]] = upper
    h[..., iu[1], iu[0]] = upper.conj()
    return h


def design_matrix(alphas, d, dim):
    """Rows ``(sample, level)``, columns the real Hermitian parameters."""
    alphas = np.atleast_1d(np.asarray(alphas, dtype=complex))
    m = displacement(-alphas, dim, check=False)[:, :d, :d]
    iu = np.triu_indices(d, 1)
    diag = np.abs(m) ** 2
    cross = m[:, :, iu[0]] * m[:, :, iu[1]].conj()
    a = np.concatenate([diag, 2.0 * cross.real, -2.0 * cross.imag], axis=-1)
    return a.reshape(alphas.size * d, d * d)


def _simplex(w):
    """Euclidean projection of each row of ``w`` onto the probability simplex."""
    u = np.sort(w, axis=-1)[..., ::-1]
    css = np.cumsum(u, axis=-1) - 1.0
    k = np.arange(1, w.shape[-1] + 1)
    ok = u - css / k > 0
    rho = w.shape[-1] - 1 - np.argmax(ok[..., ::-1], axis=-1)
    mu = np.take_along_axis(css, rho[..., None], -1) / (rho[..., None] + 1)
    return np.clip(w - mu, 0.0, None)


def project_physical(h, method="simplex"):
    """Map a Hermitian estimate onto the density matrices through its spectrum.

    ``clip`` zeroes negative eigenvalues and rescales the trace to one.
    ``simplex`` is the Frobenius-nearest density matrix: the eigenvalues are
    shifted by a common offset before clipping so that they sum to one.
    """
    if method not in PROJECTIONS:
        raise ValueError(f"unknown projection {method!r}; expected one of {PROJECTIONS}")
    h = np.asarray(h, dtype=complex)
    h = 0.5 * (h + np.swapaxes(h.conj(), -1, -2))
    w, v = np.linalg.eigh(h)
    if method == "simplex":
        w = _simplex(w)
    else:
        w = np.clip(w, 0.0, None)
        tot = w.sum(-1, keepdims=True)
        if np.any(tot <= 0):
            raise InvalidStateError("least-squares matrix has no positive spectrum to project")
        w = w / tot
    return (v * w[..., None, :]) @ np.swapaxes(v.conj(), -1, -2)


class LinearFitter:
    """Least-squares solver for a fixed set of displacements.

    Precomputes the pseudo-inverse so that many population sets measured at
    the same points (shot-noise ensembles) are fitted with one product.
    """

    def __init__(self, alphas, cfg):
        self.cfg = cfg
        self.alphas = np.atleast_1d(np.asarray(alphas, dtype=complex))
        d = cfg.d
        if self.alphas.size * d < d * d:
            raise IdentifiabilityError(
                f"{self.alphas.size} displacements give {self.alphas.size * d} equations for {d * d} unknowns"
            )
        a = design_matrix(self.alphas, d, cfg.model_dim)
        s = np.linalg.svd(a, compute_uv=False)
        rank = int(np.sum(s > s[0] * 1e-10))
        if rank < d * d:
            raise IdentifiabilityError(f"design matrix rank {rank} < {d * d}; displacements are degenerate")
        self.design = a
        lam = cfg.regularization
        if lam > 0:
            self._pinv = np.linalg.solve(a.T @ a + lam * np.eye(d * d), a.T)
        else:
            self._pinv = np.linalg.pinv(a)

    def raw(self, pops):
        """Unconstrained Hermitian estimate(s); ``pops`` shape ``(..., n, d)``."""
        pops = np.asarray(pops, dtype=float)
        b = pops[..., : self.cfg.d].reshape(pops.shape[:-2] + (-1,))
        x = b @ self._pinv.T
        return from_params(x, self.cfg.d)

    def fit(self, pops):
        return project_physical(self.raw(pops), self.cfg.projection)

    def residual(self, pops, rho):
        pops = np.asarray(pops, dtype=float)[..., : self.cfg.d]
        pred = self.design @ to_params(rho)
        return float(np.linalg.norm(pred - pops.ravel()))


def _unpack(samples, d):
    alphas = np.array([s.alpha for s in samples], dtype=complex)
    pops = np.array([np.asarray(s.populations, dtype=float)[:d] for s in samples])
    if pops.shape[-1] < d:
        raise ValueError(f"samples carry {pops.shape[-1]} populations, fit needs {d}")
    return alphas, pops


def least_squares_matrix(samples, cfg):
    """Raw (unprojected) Hermitian least-squares estimate."""
    alphas, pops = _unpack(samples, cfg.d)
    return LinearFitter(alphas, cfg).raw(pops)


def fit_density_matrix(samples, cfg, return_raw=False):
    """Fit a ``d x d`` density matrix to displaced-state populations.

    With ``return_raw`` the unprojected least-squares matrix is returned too.
    """
    raw = least_squares_matrix(samples, cfg)
    rho = project_physical(raw, cfg.projection)
    return (rho, raw) if return_raw else rho


def phase_correct(rho, beta, delta_t):
    """Undo the drive-free rotation accumulated over ``delta_t``."""
    rho = np.asarray(rho, dtype=complex)
    u = free_propagator(beta, delta_t, rho.shape[0])
    return u @ rho @ u.conj().T


def samples_from(alphas, pops):
    return [DisplacementSample(complex(a), np.asarray(p)) for a, p in zip(alphas, pops)]
