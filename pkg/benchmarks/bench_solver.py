#!/usr/bin/env python3
"""Time the solver hot paths on both kernel lanes and print a comparison.

The kernel backend is fixed at import time (``NHCOMP_PURE_PYTHON=1`` selects
the plain-Python lane), so a single process cannot time both.  Run with no
arguments and the script re-executes itself twice, once per lane, then prints
a side-by-side table:

    python3 benchmarks/bench_solver.py
    python3 benchmarks/bench_solver.py --repeats 5 --points 400

Each workload runs once untimed (warm-up, which also absorbs the jit compile
on a cold cache) and then ``--repeats`` timed passes; the best pass is kept.
Workload checksums are compared across the lanes at the end, so the table is
also a cheap cross-backend consistency check.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import subprocess
import sys
import time

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

import nhcomp.homsolve as hs
import nhcomp.stability as st
from nhcomp import ModelSpec, catalog, params_from_mu_nu
from nhcomp._kernels import JIT_ENABLED

LANES = ("pure", "jit")


def _model(kind, vid, nu):
    return ModelSpec(kind, catalog()[vid], params_from_mu_nu(2.53, nu))


def bench_sweep(points):
    """Full stress sweeps: every case for one mixed and one vol-iso model."""
    grid = hs.SweepSpec(0.05, 20.0, points).grid()
    acc = 0.0
    for model in (_model("mixed", 2, 0.45), _model("voliso", 8, 0.45)):
        for case in hs.CASES:
            for res in hs.sweep(case, model, grid):
                if res.converged:
                    acc += res.lambda_T + res.sigma11
    return acc


def bench_limits():
    """The table-reproduction inner loop: limit probes for every catalog id."""
    acc = 0.0
    for vid in sorted(catalog()):
        for kind in ("mixed", "voliso"):
            model = _model(kind, vid, 0.25)
            for case in hs.CASES:
                for direction in ("to_zero", "to_infinity"):
                    for lc in hs.limit_probe(case, model, direction).values():
                        acc += 1.0 if lc.constant is None else math.tanh(lc.constant)
    return acc


def bench_stability(grid_n):
    """Hill and corotational eigenvalue scans over a dense stretch grid."""
    grid = st.stretch_grid(grid_n)
    acc = 0.0
    for vid in (1, 4, 7):
        for kind in ("mixed", "voliso"):
            params = params_from_mu_nu(2.53, 0.45)
            for contraction in ("hill", "csp"):
                value, _, _ = st.min_coaxial_eig(kind, catalog()[vid], params, grid, contraction)
                acc += math.tanh(value)
    return acc


def run_lane(args):
    workloads = [
        ("sweep 3 cases x 2 models", bench_sweep, (args.points,)),
        ("limit probes, 8 volfuns", bench_limits, ()),
        ("stability scan %d^3 states" % args.grid_n, bench_stability, (args.grid_n,)),
    ]
    report = {"jit": JIT_ENABLED, "timings": {}, "checksums": {}}
    for name, fn, fnargs in workloads:
        fn(*fnargs)  # warm-up
        best = math.inf
        for _ in range(args.repeats):
            t0 = time.perf_counter()
            checksum = fn(*fnargs)
            best = min(best, time.perf_counter() - t0)
        report["timings"][name] = best
        report["checksums"][name] = checksum
    json.dump(report, sys.stdout)


def run_both(args):
    reports = {}
    for lane in LANES:
        env = dict(os.environ)
        if lane == "pure":
            env["NHCOMP_PURE_PYTHON"] = "1"
        else:
            env.pop("NHCOMP_PURE_PYTHON", None)
        cmd = [sys.executable, os.path.abspath(__file__), "--lane", lane,
               "--repeats", str(args.repeats), "--points", str(args.points),
               "--grid-n", str(args.grid_n)]
        proc = subprocess.run(cmd, env=env, capture_output=True, text=True)
        if proc.returncode != 0:
            sys.stderr.write(proc.stderr)
            return proc.returncode
        reports[lane] = json.loads(proc.stdout)

    if reports["jit"]["jit"] is not True:
        print("note: numba unavailable; the 'jit' lane below ran the plain-Python path\n")

    width = max(len(k) for k in reports["pure"]["timings"])
    print(f"{'workload':<{width}}  {'pure (ms)':>10}  {'jit (ms)':>10}  {'speedup':>8}")
    for name, t_pure in reports["pure"]["timings"].items():
        t_jit = reports["jit"]["timings"][name]
        print(f"{name:<{width}}  {t_pure * 1e3:>10.1f}  {t_jit * 1e3:>10.1f}  {t_pure / t_jit:>7.1f}x")

    worst = 0.0
    for name, a in reports["pure"]["checksums"].items():
        b = reports["jit"]["checksums"][name]
        worst = max(worst, abs(a - b) / max(abs(a), abs(b), 1.0))
    print(f"\nlargest cross-lane checksum deviation: {worst:.3g}")
    return 0 if worst < 1e-9 else 1


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=3, help="timed passes per workload (best kept)")
    ap.add_argument("--points", type=int, default=200, help="sweep grid size")
    ap.add_argument("--grid-n", type=int, default=14, help="stability grid is grid_n^3 states")
    ap.add_argument("--lane", choices=LANES, help=argparse.SUPPRESS)  # internal: child mode
    args = ap.parse_args(argv)
    if args.lane:
        run_lane(args)
        return 0
    return run_both(args)


if __name__ == "__main__":
    sys.exit(main())
