"""Simulation lab for direct Wigner tomography of a driven anharmonic oscillator."""
from .dmfit import FitConfig, fit_density_matrix, phase_correct
from .dynamics import PulseEnvelope, SystemParams, chirp_envelope, gaussian_envelope, propagate
from .errors import (
    ConfigError,
    IdentifiabilityError,
    NumericalValidityError,
    TruncationError,
    WignerLabError,
)
from .fockspace import displacement, dm, fock_superposition, parity_expectation, wigner_exact
from .kernels import BACKEND
from .metrics import cross_correlation, fidelity, offdiag_errors
from .readout import sample_populations
from .wigner import GridSpec, WignerGrid, purity_from_grid, wigner_map

__version__ = "0.1.0"
