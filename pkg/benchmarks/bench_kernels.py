"""Time the compiled and pure-Python propagation kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat N]

Prints one line per (workload, backend) with the best wall time and the
speed-up of the compiled core, and checks that both backends agree.
"""
import argparse
import time

import numpy as np

from wigner_lab import dynamics as dyn
from wigner_lab import fockspace as fs
from wigner_lab import kernels


def workloads():
    rng = np.random.default_rng(0)
    # decoherent chirp: one unitary per 0.01 ns step, the worst case for loop overhead
    params = dyn.SystemParams.from_mhz(25.0, 20, 120.0, 150.0)
    env = dyn.chirp_envelope(dyn.mhz_to_rad_per_ns(66.0), 0.32, -0.05, 20.0)
    uniq, inv, _, _ = dyn._plan(env, dyn.DEFAULT_STEP, None)
    us = dyn.step_unitaries(uniq, np.full(uniq.size, dyn.DEFAULT_STEP), params.beta, params.dim)
    keep, jump, dephase = dyn.decoherence_factors(params.dim, dyn.DEFAULT_STEP, params.t1, params.t2)
    rho0 = fs.dm(fs.basis(params.dim, 0))
    empty = np.zeros(0, dtype=np.int64)
    yield "density, chirp 2000 steps, dim 20", 1, (rho0, us, inv, keep, jump, dephase, True, 2, empty)
    # ket propagation through a random piecewise-constant genome
    us = dyn.step_unitaries(rng.normal(size=64) + 1j * rng.normal(size=64), np.full(64, 0.01), 0.1, 40)
    index = rng.integers(0, 64, size=20000).astype(np.int64)
    yield "ket, 20000 steps, dim 40", 0, (fs.basis(40, 0), us, index, 2, empty)


def best_time(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    available = kernels.backends()
    print(f"backends: {', '.join(sorted(available))} (default: {kernels.BACKEND})")
    for name, kind, inputs in workloads():
        results = {}
        for backend, fns in sorted(available.items()):
            t, out = best_time(fns[1] if kind else fns[0], inputs, args.repeat)
            results[backend] = (t, out)
            print(f"{name:38s} {backend:9s} {t * 1e3:9.2f} ms")
        if "compiled" in results:
            (tp, op), (tc, oc) = results["python"], results["compiled"]
            diff = float(np.max(np.abs(op[0] - oc[0])))
            print(f"{name:38s} speed-up  {tp / tc:9.1f} x   max |diff| {diff:.1e}")


if __name__ == "__main__":
    main()
