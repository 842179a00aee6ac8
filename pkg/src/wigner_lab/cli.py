"""``wigner-lab <command> --config <path> [--seed N] [--out DIR]``.

Exit status: 0 on success, 2 for configuration errors, 3 when a result
would be numerically invalid (truncation or identifiability).
"""
import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from . import genopt, io, sst
from .config import load_config
from .dmfit import FitConfig
from .dynamics import SystemParams, evolve, mhz_to_rad_per_ns
from .errors import ConfigError, InvalidDimensionError, NumericalValidityError
from .fockspace import as_density_matrix, basis, wigner_exact
from .readout import ReadoutConfig
from .wigner import GridSpec, wigner_map

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def system_params(cfg):
    s = cfg["system"]
    return SystemParams.from_mhz(s["beta_mhz"], s["dim"], s["t1"], s["t2"])


def fit_config(cfg):
    t = cfg["tomography"]
    return FitConfig(t["d"], t["n_samples"], t["radius"], t["regularization"], projection=t["projection"])


def genopt_config(cfg, seed):
    o = cfg["optimizer"]
    return genopt.GenoptConfig(
        target=genopt.target_populations(o["target_level"], cfg["tomography"]["d"]),
        n_genomes=o["n_genomes"],
        n_elite=o["n_elite"],
        n_timesteps=o["n_timesteps"],
        max_amp=o["max_amp"],
        noise_frac=o["noise_frac"],
        n_rep=o["n_rep"],
        repetitions=o["repetitions"] or None,
        generations=o["generations"],
        plateau_generations=o["plateau_generations"],
        plateau_tol=o["plateau_tol"],
        remeasure=o["remeasure"],
        seed=seed,
    )


class Context:
    def __init__(self, cfg, seed, out):
        self.cfg = cfg
        self.seed = seed
        self.out = Path(out)
        self.hash = io.config_hash(f"{cfg.text}\n#seed={seed}")
        self.written = []

    def csv(self, name, columns, rows):
        self.written.append(io.write_csv(self.out / name, columns, rows, self.hash))

    def json(self, name, obj):
        self.written.append(io.write_json(self.out / name, {"config_hash": self.hash, **obj}))


def cmd_displace(ctx):
    cfg = ctx.cfg
    d = cfg["displace"]
    p = cfg["pulse"]
    params = system_params(cfg)
    alphas = np.linspace(d["alpha_min"], d["alpha_max"], d["n_alpha"])
    pulsed, poisson = ex.displace_sweep(params, alphas, p["fwhm"], p["step"], p["cutoff"], d["levels"])
    rows = [(a, n, pulsed[i, n], poisson[i, n]) for i, a in enumerate(alphas) for n in range(d["levels"])]
    ctx.csv("displace.csv", ["alpha", "n", "p_pulsed", "p_harmonic"], rows)


def _prepared_state(cfg, params):
    t = cfg["tomography"]
    if t["genome"] is None:
        return ex.zero_l_state(t["level"], params.dim)
    with open(t["genome"]) as fh:
        rec = json.load(fh)
    samples = np.array([complex(re, im) for re, im in rec["best"]["samples"]])
    return evolve(basis(params.dim, 0), genopt.Genome(samples).envelope(), params)


def cmd_wigner(ctx):
    cfg = ctx.cfg
    t = cfg["tomography"]
    p = cfg["pulse"]
    params = system_params(cfg)
    state = _prepared_state(cfg, params)
    mode = t["mode"]
    spec = GridSpec.square(t["grid_radius"], t["grid_n"])
    rho = as_density_matrix(np.outer(state, state.conj()) if state.ndim == 1 else state)
    exact = wigner_exact(rho, spec)
    noise = ReadoutConfig(t["repetitions"], levels=t["d"])
    measured = wigner_map(rho, spec, mode, params, ctx.seed, p["fwhm"], p["cutoff"], noise, p["step"])
    res = ex.tomography_pipeline(
        rho,
        params,
        fit_config(cfg),
        seed=ctx.seed,
        pulse_fwhm=p["fwhm"],
        cutoff=p["cutoff"],
        step=p["step"],
        decoherence=mode != "pulsed",
        repetitions=t["repetitions"] if mode.endswith("shot-noise") else None,
        phase_dt=t["phase_dt"],
        l=t["level"],
    )
    ctx.csv("wigner_exact.csv", ["x", "y", "W"], io.grid_rows(exact))
    ctx.csv("wigner_measured.csv", ["x", "y", "W"], io.grid_rows(measured))
    ctx.json("rho_fit.json", io.matrix_to_json(res.rho_fit))
    ctx.json("rho_raw.json", io.matrix_to_json(res.rho_raw))
    ctx.json("errors.json", {**res.errors.as_dict(), "phase_dt": res.phase_dt, "mode": mode})


def cmd_chirp(ctx):
    c = ctx.cfg["chirp"]
    params = SystemParams.from_mhz(c["beta_mhz"], c["dim"], c["t1"], c["t2"])
    res = ex.chirp_experiment(
        params,
        mhz_to_rad_per_ns(c["rabi_mhz"]),
        c["f_start_ghz"],
        c["f_end_ghz"],
        c["duration"],
        c["t_end"],
        c["sample_every"],
        c["snapshots"],
        GridSpec.square(c["grid_radius"], c["grid_n"]),
        c["fit_delay"],
        ctx.cfg["pulse"]["step"],
    )
    ctx.csv("purity.csv", ["t", "purity"], zip(res.times, res.purity))
    snap_rows = zip(res.snapshot_times, res.frame_phase, res.grid_purity, res.snapshot_purity)
    ctx.csv("snapshots.csv", ["t", "frame_phase", "purity_grid", "purity_trace"], snap_rows)
    for t, g in zip(res.snapshot_times, res.grids):
        ctx.csv(f"chirp_grid_t{io.fmt(float(t))}.csv", ["x", "y", "W"], io.grid_rows(g))
    ctx.json("chirp_summary.json", {"t_min": res.t_min, "recovery_time": res.tau})


def cmd_genopt(ctx):
    cfg = ctx.cfg
    params = system_params(cfg)
    gcfg = genopt_config(cfg, ctx.seed)
    rec = genopt.run(gcfg, params)
    ctx.json("genopt.json", json.loads(rec.to_json()))
    pops = genopt.prepared_populations(rec.best, params, gcfg.target.size)
    ctx.csv("genopt_populations.csv", ["n", "target", "p_best"], zip(range(pops.size), gcfg.target, pops))


def cmd_compare(ctx):
    c = ctx.cfg["compare"]
    d = ctx.cfg["tomography"]["d"]
    fit = FitConfig(d, radius=ctx.cfg["tomography"]["radius"], projection=c["projection"])
    wt = sst.WTConfig(c["wt_repetitions"], c["wt_pulses"], fit)
    sc = sst.SSTConfig(d, c["sst_repetitions"], projection=c["projection"])
    summary = {}
    for name, psi in (("l4", ex.zero_l_state(4, d)), ("flat5", ex.flat_state(5, d))):
        rows = sst.compare_wt_sst(psi, wt, sc, c["ensemble"], seed=ctx.seed)
        ctx.csv(f"compare_{name}.csv", ["method", "N", "mean_dF", "std_dF"], rows)
        summary[name] = {
            "slope_wt": sst.loglog_fit(rows, "WT")[0],
            "slope_sst": sst.loglog_fit(rows, "SST")[0],
            "efficiency_ratio": sst.efficiency_ratio(rows, c["target_df"]),
        }
    ctx.json("compare_summary.json", summary)


COMMANDS = {
    "displace": cmd_displace,
    "wigner": cmd_wigner,
    "chirp": cmd_chirp,
    "genopt": cmd_genopt,
    "compare": cmd_compare,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="wigner-lab", description="Wigner tomography simulation experiments.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, help="experiment config file")
    ap.add_argument("--seed", type=int, default=None, help="override [experiment] seed")
    ap.add_argument("--out", default=None, help="override [experiment] out directory")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        seed = cfg.seed if args.seed is None else args.seed
        out = cfg.out if args.out is None else args.out
        ctx = Context(cfg, seed, out)
        COMMANDS[args.command](ctx)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except InvalidDimensionError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalValidityError as e:
        print(f"numerical validity error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    for path in ctx.written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
