"""Truncated Fock-space operators, states and exact phase-space primitives.

Matrices are plain ``numpy`` complex arrays; the helpers in this module
validate them on the way in instead of wrapping them in classes.
"""
from functools import lru_cache

import numpy as np

from .errors import InvalidDimensionError, InvalidStateError

WIGNER_MAX = 2.0 / np.pi

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-9
PSD_TOL = 1e-9
NORM_TOL = 1e-10


def _check_dim(dim):
    if int(dim) != dim or dim < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {dim!r}")
    return int(dim)


def annihilation(dim):
    """Lowering operator ``a`` with ``a[n, n+1] = sqrt(n+1)``."""
    dim = _check_dim(dim)
    return np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(complex)


def creation(dim):
    return annihilation(dim).T.copy()


def number_op(dim):
    dim = _check_dim(dim)
    return np.diag(np.arange(dim)).astype(complex)


def basis(dim, n):
    dim = _check_dim(dim)
    if not 0 <= n < dim:
        raise InvalidDimensionError(f"level {n} outside a {dim}-level space")
    psi = np.zeros(dim, dtype=complex)
    psi[n] = 1.0
    return psi


def superposition(dim, levels, amplitudes=None):
    """Normalized pure state over ``levels`` (equal weights by default)."""
    psi = np.zeros(_check_dim(dim), dtype=complex)
    if amplitudes is None:
        amplitudes = np.ones(len(levels))
    for n, c in zip(levels, amplitudes):
        if not 0 <= n < dim:
            raise InvalidDimensionError(f"level {n} outside a {dim}-level space")
        psi[n] += c
    return psi / np.linalg.norm(psi)


def fock_superposition(dim, l, phase=0.0):
    """The benchmark state ``(|0> + e^{i phase}|l>)/sqrt(2)``."""
    return superposition(dim, [0, l], [1.0, np.exp(1j * phase)])


def as_pure_state(psi):
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise InvalidStateError("pure state must be a 1-D amplitude vector")
    _check_dim(psi.size)
    norm2 = float(np.vdot(psi, psi).real)
    if abs(norm2 - 1.0) > NORM_TOL:
        raise InvalidStateError(f"state norm^2 = {norm2:.3g}, expected 1")
    return psi


def dm(psi):
    """Projector ``|psi><psi|``."""
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def as_density_matrix(rho, *, herm_tol=HERMITIAN_TOL, trace_tol=TRACE_TOL, psd_tol=PSD_TOL):
    """Validate ``rho`` as a density matrix and return it as a complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"density matrix must be square, got shape {rho.shape}")
    _check_dim(rho.shape[0])
    if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
        raise InvalidStateError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise InvalidStateError(f"density matrix trace is {tr:.12g}, expected 1")
    lam_min = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
    if lam_min < -psd_tol:
        raise InvalidStateError(f"density matrix has eigenvalue {lam_min:.3g} < 0")
    return rho


def embed(rho, dim):
    """Zero-pad an operator into the lowest block of a ``dim``-level space."""
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    if dim < d:
        raise InvalidDimensionError(f"cannot embed a {d}-level operator in {dim} levels")
    out = np.zeros((dim, dim), dtype=complex)
    out[:d, :d] = rho
    return out


def purity(rho):
    rho = np.asarray(rho)
    return float(np.real(np.vdot(rho.conj().T, rho)))


def min_displacement_dim(alpha_abs):
    """Smallest dimension accepted for a displacement of size ``|alpha|``."""
    a2 = float(alpha_abs) ** 2
    return int(np.ceil(a2 + 6.0 * np.sqrt(a2) + 4.0 - 1e-12))


def check_displacement_dim(alpha, dim):
    need = min_displacement_dim(np.max(np.abs(np.atleast_1d(alpha))))
    if dim < need:
        raise InvalidDimensionError(
            f"|alpha| = {np.max(np.abs(np.atleast_1d(alpha))):.3g} needs dim >= {need}, got {dim}"
        )


@lru_cache(maxsize=32)
def _quadrature_eig(dim):
    # i(a^dag - a) is Hermitian; exp(r(a^dag - a)) = V exp(-i r w) V^dag
    a = annihilation(dim)
    k = 1j * (a.conj().T - a)
    w, v = np.linalg.eigh(k)
    w.setflags(write=False)
    v.setflags(write=False)
    return w, v


def real_displacement(r, dim, ncols=None):
    """``exp(r (a^dag - a))`` for real ``r``; batched over ``r``. Real orthogonal.

    With ``ncols`` only the first ``ncols`` columns are formed.
    """
    w, v = _quadrature_eig(_check_dim(dim))
    ncols = dim if ncols is None else ncols
    r = np.asarray(r, dtype=float)
    phases = np.exp(-1j * r[..., None] * w)
    out = np.einsum("ik,...k,jk->...ij", v, phases, v[:ncols].conj(), optimize=True)
    return out.real


def _unique_radii(alphas):
    r = np.round(np.abs(alphas), 12)
    return np.unique(r, return_inverse=True)


def displacement(alpha, dim, check=True):
    """Displacement operator ``exp(alpha a^dag - alpha^* a)`` in ``dim`` levels.

    ``alpha`` may be an array, in which case a stack of matrices is returned.
    A phase rotation maps every complex ``alpha`` onto the real axis, so a
    single eigendecomposition of the quadrature generator serves all of them.
    """
    dim = _check_dim(dim)
    alpha = np.asarray(alpha, dtype=complex)
    if check:
        check_displacement_dim(alpha, dim)
    n = np.arange(dim)
    rot = np.exp(1j * np.angle(alpha)[..., None] * n)
    core = real_displacement(np.abs(alpha), dim)
    return rot[..., :, None] * core * rot[..., None, :].conj()


def displaced_populations(rho, alphas, dim=None):
    """Diagonals of ``D(alpha) rho D(alpha)^dag`` for each alpha.

    ``rho`` (d x d) is embedded in ``dim`` levels; returns an array of shape
    ``(len(alphas), dim)``.
    """
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    alphas = np.atleast_1d(np.asarray(alphas, dtype=complex)).ravel()
    if dim is None:
        dim = d + min_displacement_dim(np.max(np.abs(alphas), initial=0.0))
    radii, inv = _unique_radii(alphas)
    m = real_displacement(radii, dim, d)[inv.ravel()]
    ph = np.exp(-1j * np.angle(alphas)[:, None] * np.arange(d))
    rho_rot = ph[:, :, None] * rho[None] * ph[:, None, :].conj()
    return np.einsum("pnj,pjk,pnk->pn", m, rho_rot, m, optimize=True).real


def displaced_parity(rho, alphas, dim=None):
    """``(2/pi) <parity>`` of ``D(alpha) rho D(alpha)^dag`` for each alpha.

    Equivalent to ``parity_from_populations(displaced_populations(...))`` but
    contracts the parity inside the radial factor, which is shared by all
    points of equal ``|alpha|``.
    """
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    alphas = np.atleast_1d(np.asarray(alphas, dtype=complex)).ravel()
    if dim is None:
        dim = d + min_displacement_dim(np.max(np.abs(alphas), initial=0.0))
    radii, inv = _unique_radii(alphas)
    m = real_displacement(radii, dim, d)
    signs = np.where(np.arange(dim) % 2 == 0, 1.0, -1.0)
    q = np.einsum("rnj,n,rnk->rjk", m, signs, m, optimize=True)[inv.ravel()]
    ph = np.exp(-1j * np.angle(alphas)[:, None] * np.arange(d))
    val = np.einsum("pj,jk,pk,pjk->p", ph, rho, ph.conj(), q, optimize=True).real
    return WIGNER_MAX * val


def parity_from_populations(p):
    """``(2/pi) sum_n (-1)^n P_n``; works along the last axis."""
    p = np.asarray(p, dtype=float)
    signs = np.where(np.arange(p.shape[-1]) % 2 == 0, 1.0, -1.0)
    return WIGNER_MAX * (p @ signs)


def parity_expectation(rho):
    """Displaced-parity Wigner value ``(2/pi) sum_n (-1)^n rho_nn`` (no displacement)."""
    rho = np.asarray(rho)
    return float(parity_from_populations(np.real(np.diagonal(rho))))


def wigner_exact(rho, grid):
    """Wigner function from ideal displaced parity on every node of ``grid``.

    ``grid`` is a :class:`wigner_lab.wigner.GridSpec`. The state is padded
    beyond the truncation heuristic (by its own dimension plus ten levels) so
    the matrix-exponential edge error stays near machine precision.
    """
    from .wigner import WignerGrid

    rho = as_density_matrix(rho)
    alphas = grid.alphas()
    pad = 2 * rho.shape[0] + 10 + min_displacement_dim(np.max(np.abs(alphas)))
    values = displaced_parity(rho, -alphas.ravel(), pad).reshape(alphas.shape)
    return WignerGrid(grid, values)


def coherent_state(alpha, dim):
    return displacement(alpha, dim) @ basis(dim, 0)


def poisson_populations(alpha_abs, nmax):
    """Harmonic displacement populations ``exp(-|a|^2)|a|^{2n}/n!`` for n < nmax."""
    from scipy.stats import poisson

    return poisson.pmf(np.arange(nmax), float(alpha_abs) ** 2)
