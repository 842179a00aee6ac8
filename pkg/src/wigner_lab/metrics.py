"""Error measures: state fidelity, grid cross-correlation, off-diagonal errors."""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidStateError, UndefinedCorrelationError

PSD_CLIP_TOL = 1e-9


@dataclass(frozen=True)
class ErrorReport:
    fidelity_error: float
    amp_error_0l: float
    phase_error_0l: float

    def as_dict(self):
        return {
            "fidelity_error": self.fidelity_error,
            "amp_error_0l": self.amp_error_0l,
            "phase_error_0l": self.phase_error_0l,
        }

    def max(self):
        return max(self.fidelity_error, self.amp_error_0l, self.phase_error_0l)


def _psd_sqrt(rho, name):
    rho = np.asarray(rho, dtype=complex)
    rho = 0.5 * (rho + rho.conj().T)
    w, v = np.linalg.eigh(rho)
    if w[0] < -PSD_CLIP_TOL:
        raise InvalidStateError(f"{name} has eigenvalue {w[0]:.3g} < 0")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho_a, rho_b):
    """Uhlmann fidelity ``Tr sqrt(sqrt(a) b sqrt(a))`` (not squared).

    Evaluated as the trace norm of ``sqrt(a) sqrt(b)``, which is symmetric in
    its arguments and avoids square roots of tiny negative eigenvalues.
    """
    rho_a = np.asarray(rho_a, dtype=complex)
    rho_b = np.asarray(rho_b, dtype=complex)
    if rho_a.shape != rho_b.shape:
        raise ValueError(f"dimension mismatch: {rho_a.shape} vs {rho_b.shape}")
    sa = _psd_sqrt(rho_a, "rho_a")
    sb = _psd_sqrt(rho_b, "rho_b")
    f = float(np.sum(np.linalg.svd(sa @ sb, compute_uv=False)))
    return min(max(f, 0.0), 1.0)


def fidelity_error(rho_a, rho_b):
    return 1.0 - fidelity(rho_a, rho_b)


def cross_correlation(f, g):
    """Zero-offset normalized cross-correlation of two grids (or arrays)."""
    fv = getattr(f, "values", f)
    gv = getattr(g, "values", g)
    if hasattr(f, "spec") and hasattr(g, "spec") and f.spec != g.spec:
        raise ValueError("grids are sampled on different specs")
    fv = np.asarray(fv, dtype=float)
    gv = np.asarray(gv, dtype=float)
    if fv.shape != gv.shape:
        raise ValueError(f"shape mismatch: {fv.shape} vs {gv.shape}")
    df = fv - fv.mean()
    dg = gv - gv.mean()
    denom = np.sqrt(np.sum(df * df) * np.sum(dg * dg))
    if denom == 0.0:
        raise UndefinedCorrelationError("cross-correlation of a constant grid is undefined")
    return float(np.sum(df * dg) / denom)


def phase_error(z_fit, z_ideal):
    """``|arg z_fit - arg z_ideal| / 2 pi`` wrapped into ``[0, 0.5]``."""
    d = np.angle(z_fit) - np.angle(z_ideal)
    d = (d + np.pi) % (2.0 * np.pi) - np.pi
    return float(abs(d) / (2.0 * np.pi))


def offdiag_errors(rho_fit, rho_ideal, l):
    """Fidelity error plus amplitude and phase errors of element ``(0, l)``."""
    rho_fit = np.asarray(rho_fit, dtype=complex)
    rho_ideal = np.asarray(rho_ideal, dtype=complex)
    if not 0 < l < min(rho_fit.shape[0], rho_ideal.shape[0]):
        raise ValueError(f"off-diagonal index {l} outside the matrices")
    return ErrorReport(
        fidelity_error=fidelity_error(rho_fit, rho_ideal),
        amp_error_0l=float(abs(abs(rho_fit[0, l]) - abs(rho_ideal[0, l]))),
        phase_error_0l=phase_error(rho_fit[0, l], rho_ideal[0, l]),
    )
