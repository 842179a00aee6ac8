"""Pure-numpy propagation kernels.

Reference implementation of the step loops in ``_kernels.pyx``; selected
automatically when the compiled extension is unavailable.
"""
import numpy as np


def evolve_ket(psi, unitaries, index, n_guard, record):
    psi = np.array(psi, dtype=complex)
    dim = psi.shape[0]
    snaps = np.empty((len(record), dim), dtype=complex)
    r = 0
    while r < len(record) and record[r] == 0:
        snaps[r] = psi
        r += 1
    guard = float(np.sum(np.abs(psi[dim - n_guard:]) ** 2)) if n_guard else 0.0
    for step, k in enumerate(index, start=1):
        psi = unitaries[k] @ psi
        if n_guard:
            guard = max(guard, float(np.sum(np.abs(psi[dim - n_guard:]) ** 2)))
        while r < len(record) and record[r] == step:
            snaps[r] = psi
            r += 1
    return psi, guard, snaps


def evolve_density(rho, unitaries, index, keep, jump, dephase, decohere, n_guard, record):
    rho = np.array(rho, dtype=complex)
    dim = rho.shape[0]
    snaps = np.empty((len(record), dim, dim), dtype=complex)
    r = 0
    while r < len(record) and record[r] == 0:
        snaps[r] = rho
        r += 1
    keep2 = np.outer(keep, keep)
    jump2 = np.outer(jump[1:], jump[1:])
    guard = float(np.sum(np.diagonal(rho).real[dim - n_guard:])) if n_guard else 0.0
    for step, k in enumerate(index, start=1):
        u = unitaries[k]
        rho = u @ rho @ u.conj().T
        if decohere:
            out = keep2 * rho
            out[:-1, :-1] += jump2 * rho[1:, 1:]
            rho = out * dephase
        if n_guard:
            guard = max(guard, float(np.sum(np.diagonal(rho).real[dim - n_guard:])))
        while r < len(record) and record[r] == step:
            snaps[r] = rho
            r += 1
    return rho, guard, snaps
