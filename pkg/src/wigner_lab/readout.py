"""Idealized level-population readout with experiment-like shot noise.

The experiment infers populations from tunneling (escape) probabilities:
a measurement pulse of a given height makes every level ``n >= k`` escape,
so each pulse measures a cumulative probability ``S_k``. Shot noise is
therefore binomial on the ``S_k``, and populations are their differences.
"""
from dataclasses import dataclass

import numpy as np

METHODS = ("cumulative", "multinomial")


@dataclass(frozen=True)
class ReadoutConfig:
    repetitions: int = 900
    method: str = "cumulative"
    levels: int = 6

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.method not in METHODS:
            raise ValueError(f"unknown readout method {self.method!r}; expected one of {METHODS}")
        if self.levels < 2:
            raise ValueError("at least two levels must be measured")


def populations(rho, d=None):
    """Diagonal of ``rho`` on the lowest ``d`` levels."""
    rho = np.asarray(rho)
    p = np.real(np.diagonal(rho, axis1=-2, axis2=-1))
    if d is None:
        return p.copy()
    if d > p.shape[-1]:
        raise ValueError(f"cannot read {d} levels from a {p.shape[-1]}-level state")
    return p[..., :d].copy()


def escape_probabilities(p):
    """Cumulative ``S_k = sum_{n >= k} p_n`` along the last axis."""
    p = np.asarray(p, dtype=float)
    return np.flip(np.cumsum(np.flip(p, -1), -1), -1)


def sample_populations(p, repetitions, rng, method="cumulative", size=None):
    """Shot-noise estimate of the population vector(s) ``p``.

    With ``method="cumulative"`` every ``S_k`` is drawn independently from
    ``Binomial(repetitions, S_k) / repetitions`` and the estimate is
    ``S_n - S_{n+1}``; entries may come out negative and are not clipped.
    ``size`` prepends ensemble axes. The last axis of ``p`` should extend
    over every populated level so the top cumulative sum is meaningful.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    p = np.asarray(p, dtype=float)
    shape = p.shape if size is None else tuple(np.atleast_1d(size)) + p.shape
    if method == "cumulative":
        s = np.clip(escape_probabilities(p), 0.0, 1.0)
        s_hat = rng.binomial(repetitions, np.broadcast_to(s, shape)) / repetitions
        out = s_hat.copy()
        out[..., :-1] -= s_hat[..., 1:]
        return out
    if method == "multinomial":
        q = np.clip(p, 0.0, None)
        total = q.sum(-1, keepdims=True)
        q = q / np.where(total > 0, total, 1.0)
        counts = rng.multinomial(repetitions, np.broadcast_to(q, shape))
        return counts / repetitions * np.broadcast_to(np.clip(total, 0.0, 1.0), shape[:-1] + (1,))
    raise ValueError(f"unknown readout method {method!r}")


def binomial_sigma(s, repetitions):
    s = np.asarray(s, dtype=float)
    return np.sqrt(s * (1.0 - s) / repetitions)
