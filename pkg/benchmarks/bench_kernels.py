#!/usr/bin/env python3
"""Compare the numba and numpy simplex kernels.

Usage:
  python benchmarks/bench_kernels.py            # LP sizes 10..80 plus the MRS suite
  python benchmarks/bench_kernels.py --repeat 5

The first numba call per signature is compiled (or loaded from cache) during a
warm-up pass, so the timings below are steady state.
"""

import argparse
import time

import numpy as np

from dea_mrs import _kernels, dea, lp, mrs, synthetic
from dea_mrs.lp import LpProblem


def random_lp(rng, n):
    A = rng.uniform(0.0, 1.0, (n, n))
    return LpProblem(rng.uniform(0.0, 1.0, n), A, np.ones(n), ["<="] * n, "max")


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def suite_pass(instances):
    for ds in instances:
        for o in range(ds.n):
            theta = dea.bcc_evaluate(ds, o).theta_star
            mrs.mrs_lp_procedure(ds, o, theta)
            mrs.mrs_primal_milp(ds, o, theta)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--instances", type=int, default=10, help="suite instances used for the MRS workload")
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    rng = np.random.default_rng(0)
    problems = {n: random_lp(rng, n) for n in (10, 20, 40, 80)}
    instances = synthetic.suite()[: args.instances]
    workloads = [(f"random LP n={n}", lambda p=p: lp.solve(p)) for n, p in problems.items()]
    workloads.append((f"MRS suite x{len(instances)}", lambda: suite_pass(instances)))

    print(f"{'workload':<22}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for label, fn in workloads:
        row = {}
        for name in ("numpy", "numba"):
            with _kernels.use_backend(name):
                fn()  # warm-up
                row[name] = best_of(fn, args.repeat) * 1e3
        print(f"{label:<22}{row['numpy']:>12.2f}{row['numba']:>12.2f}{row['numpy'] / row['numba']:>9.1f}x")


if __name__ == "__main__":
    main()
