"""Guided-evolution (genetic) optimizer for state-preparation pulses.

A genome is a short sequence of complex drive amplitudes at 1 ns spacing.
Each generation keeps the ``n_elite`` best genomes, breeds ``n_elite``
children from adjacent-rank parent pairs, and refills the rest at random.
Scores are population overlaps measured through a simulated, shot-noise
limited readout.
"""
import dataclasses
import json
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .dynamics import PulseEnvelope, SystemParams, evolve
from .errors import TruncationError, UndefinedOverlapError
from .fockspace import basis
from .parallel import map_ordered
from .readout import sample_populations

GENOME_DT = 1.0


@dataclass(frozen=True)
class Genome:
    samples: np.ndarray
    chi: Optional[float] = None

    def with_chi(self, chi):
        return Genome(self.samples, float(chi))

    def envelope(self):
        return PulseEnvelope(self.samples, GENOME_DT)


def target_populations(l, d=6):
    """Population pattern of ``(|0> + |l>)/sqrt(2)`` on ``d`` levels."""
    if not 0 < l < d:
        raise ValueError(f"level {l} outside 1..{d - 1}")
    p = np.zeros(d)
    p[0] = p[l] = 0.5
    return p


@dataclass(frozen=True)
class GenoptConfig:
    target: np.ndarray = field(default_factory=lambda: target_populations(1))
    n_genomes: int = 30
    n_elite: int = 8
    n_timesteps: int = 15
    max_amp: Optional[float] = None
    noise_frac: float = 0.05
    n_rep: int = 5
    repetitions: Optional[int] = 900
    generations: int = 200
    plateau_generations: int = 30
    plateau_tol: float = 0.003
    remeasure: bool = True
    seed: int = 0

    def __post_init__(self):
        if not 2 * self.n_elite < self.n_genomes:
            raise ValueError("need 2 * n_elite < n_genomes")
        if self.n_elite < 1 or self.n_timesteps < 1:
            raise ValueError("n_elite and n_timesteps must be >= 1")
        if not 0 <= self.noise_frac < 1:
            raise ValueError("noise amplitude must satisfy 0 <= eps_max < max_amp")
        if self.n_rep < 1 or self.generations < 1:
            raise ValueError("n_rep and generations must be >= 1")
        t = np.asarray(self.target, dtype=float)
        if t.ndim != 1 or t.size < 2 or not np.linalg.norm(t) > 0:
            raise ValueError("target must be a nonzero population vector")
        object.__setattr__(self, "target", t)

    @property
    def omega_max(self):
        """Amplitude bound; by default a constant full-length pulse has area ``3 pi``."""
        if self.max_amp is not None:
            return self.max_amp
        return 3.0 * np.pi / (self.n_timesteps * GENOME_DT)

    @property
    def eps_max(self):
        return self.noise_frac * self.omega_max

    def as_dict(self):
        out = dataclasses.asdict(self)
        out["target"] = [float(x) for x in self.target]
        out["omega_max"] = float(self.omega_max)
        return out


def chi(p_ideal, p_meas, normalize=True):
    """Population overlap: cosine similarity, or the raw dot product."""
    a = np.asarray(p_ideal, dtype=float)
    b = np.asarray(p_meas, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    dot = float(a @ b)
    if not normalize:
        return dot
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise UndefinedOverlapError("overlap with a zero population vector is undefined")
    return dot / (na * nb)


def _random_amps(rng, n, radius):
    """Complex amplitudes uniform over the disk ``|z| <= radius``."""
    r = radius * np.sqrt(rng.random(n))
    return r * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, n))


def _clip(samples, omega_max):
    mag = np.abs(samples)
    over = mag > omega_max
    out = samples.copy()
    out[over] *= omega_max / mag[over]
    return out


def random_genome(cfg, rng):
    return Genome(_random_amps(rng, cfg.n_timesteps, cfg.omega_max))


def prepared_populations(genome, params, d):
    """Noiseless populations of the lowest ``d`` levels after the genome's pulse."""
    out = evolve(basis(params.dim, 0), genome.envelope(), params)
    p = np.abs(out) ** 2 if out.ndim == 1 else np.real(np.diagonal(out))
    return p[:d]


def evaluate(genome, cfg, params, rng=None, repetitions=None):
    """Score one genome; shot noise is applied when ``repetitions`` is set."""
    p = prepared_populations(genome, params, cfg.target.size)
    if repetitions is not None:
        p = sample_populations(p, repetitions, rng)
    return chi(cfg.target, p)


def crossover(a, b, cfg, rng):
    """Per-timestep random pick between two parents, plus disk noise, clipped."""
    pick = rng.random(cfg.n_timesteps) < 0.5
    child = np.where(pick, a.samples, b.samples)
    if cfg.eps_max > 0:
        child = child + _random_amps(rng, cfg.n_timesteps, cfg.eps_max)
    return Genome(_clip(child, cfg.omega_max))


def next_generation(population, cfg, rng):
    """Elites, then children of ``(G_k, G_k+1)`` for ``k < n_elite``, then random genomes."""
    chis = [g.chi for g in population]
    if any(c is None for c in chis) or any(x < y for x, y in zip(chis, chis[1:])):
        raise ValueError("population must be scored and sorted by decreasing chi")
    elites = list(population[: cfg.n_elite])
    children = [crossover(population[k], population[k + 1], cfg, rng) for k in range(cfg.n_elite)]
    fresh = [random_genome(cfg, rng) for _ in range(cfg.n_genomes - 2 * cfg.n_elite)]
    return elites + children + fresh


@dataclass
class RunRecord:
    config: GenoptConfig
    best: Genome
    history: List[dict]
    promotions: List[dict]

    def to_json(self):
        rec = {
            "config": self.config.as_dict(),
            "history": self.history,
            "best": {
                "chi": self.best.chi,
                "samples": [[float(z.real), float(z.imag)] for z in self.best.samples],
            },
        }
        return json.dumps(rec, indent=2, sort_keys=True) + "\n"


def _safe_evaluate(genome, cfg, params, rng):
    # a pulse that pumps population out of the simulated space is rejected
    try:
        return evaluate(genome, cfg, params, rng, cfg.repetitions), False
    except TruncationError:
        return 0.0, True


def _score(genomes, cfg, params, seed, generation):
    def one(i):
        rng = np.random.default_rng([seed, generation, i])
        return _safe_evaluate(genomes[i], cfg, params, rng)

    res = map_ordered(one, range(len(genomes)))
    return [g.with_chi(c) for g, (c, _) in zip(genomes, res)], sum(r for _, r in res)


def run(cfg, params, callback=None):
    """Optimize until the generation limit or a ``chi`` plateau.

    With ``cfg.remeasure`` any new genome whose noisy score beats the current
    best is re-measured ``n_rep`` times and scored by the mean.
    """
    rng = np.random.default_rng([cfg.seed, 0])
    pop = [random_genome(cfg, rng) for _ in range(cfg.n_genomes)]
    scored, _ = _score(pop, cfg, params, cfg.seed, 0)
    pop = sorted(scored, key=lambda g: -g.chi)
    history, promotions = [], []
    last_gain = 0
    best_seen = pop[0].chi
    for gen in range(1, cfg.generations + 1):
        best = pop[0]
        pop = next_generation(pop, cfg, rng)
        new, rejected = _score(pop[cfg.n_elite :], cfg, params, cfg.seed, gen)
        if cfg.remeasure and cfg.repetitions is not None:
            for i, g in enumerate(new):
                if g.chi > best.chi:
                    reps = [
                        _safe_evaluate(g, cfg, params, np.random.default_rng([cfg.seed, gen, i, k]))[0]
                        for k in range(cfg.n_rep)
                    ]
                    new[i] = g.with_chi(np.mean(reps))
        pop = sorted(pop[: cfg.n_elite] + new, key=lambda g: -g.chi)
        if pop[0] is not best:
            promotions.append({"generation": gen, "previous": best, "promoted": pop[0]})
        chis = np.array([g.chi for g in pop])
        history.append(
            {"generation": gen, "best_chi": float(chis[0]), "mean_chi": float(chis.mean()), "rejected": rejected}
        )
        if callback is not None:
            callback(gen, pop)
        if chis[0] > best_seen + cfg.plateau_tol:
            best_seen = chis[0]
            last_gain = gen
        if gen - last_gain >= cfg.plateau_generations:
            break
    return RunRecord(cfg, pop[0], history, promotions)


def chi_scatter(genome, cfg, params, n, seed=0):
    """Standard deviation of ``n`` independent noisy scores of one genome."""
    rng = np.random.default_rng(seed)
    p = prepared_populations(genome, params, cfg.target.size)
    noisy = sample_populations(p, cfg.repetitions, rng, size=n)
    return float(np.std([chi(cfg.target, q) for q in noisy], ddof=1))


def default_params():
    return SystemParams.from_mhz(20.0, dim=25)


def false_promotions(record, params):
    """Promotions whose noiseless score is below that of the genome they displaced."""
    cfg = record.config
    bad = 0
    for ev in record.promotions:
        if evaluate(ev["promoted"], cfg, params) < evaluate(ev["previous"], cfg, params):
            bad += 1
    return bad, len(record.promotions)
