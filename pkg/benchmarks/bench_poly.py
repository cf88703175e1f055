#!/usr/bin/env python3
"""Benchmark the compiled polynomial core against the pure-Python fallback.

Builds the expansion kernels through order 8 (the hot loop of the symbolic
pipeline) in both two and three coordinates, in a subprocess per backend so
the import-time selection is exercised exactly as users hit it.

    python3 benchmarks/bench_poly.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys

SNIPPET = r"""
import json, time
from ymqm.polynomial import BACKEND
from ymqm.kernels import potential, resummed_kernels

out = {"backend": BACKEND, "cases": {}}
for dims, order in ((2, 8), (3, 8)):
    t0 = time.perf_counter()
    S = resummed_kernels(potential(dims, quartic=True, higgs=True), order)
    dt = time.perf_counter() - t0
    out["cases"][f"dims={dims} order={order}"] = {
        "seconds": dt,
        "terms_top": S[order].n_terms,
    }
print(json.dumps(out))
"""


def run_backend(pure, repeat):
    env = dict(os.environ)
    env["YMQM_PURE_POLY"] = "1" if pure else "0"
    best = None
    for _ in range(repeat):
        proc = subprocess.run(
            [sys.executable, "-c", SNIPPET], capture_output=True, text=True, env=env
        )
        proc.check_returncode()
        data = json.loads(proc.stdout)
        if best is None:
            best = data
        else:
            for case, row in data["cases"].items():
                if row["seconds"] < best["cases"][case]["seconds"]:
                    best["cases"][case]["seconds"] = row["seconds"]
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    results = {}
    for pure in (False, True):
        data = run_backend(pure, args.repeat)
        results[data["backend"]] = data["cases"]
        print(f"backend: {data['backend']}")
        for case, row in data["cases"].items():
            print(f"  {case}: {row['seconds']:.3f} s  ({row['terms_top']} terms at the top order)")
    if {"compiled", "pure-python"} <= results.keys():
        print("speedup (pure / compiled):")
        for case in results["compiled"]:
            ratio = results["pure-python"][case]["seconds"] / results["compiled"][case]["seconds"]
            print(f"  {case}: {ratio:.1f}x")
        for case in results["compiled"]:
            a = results["compiled"][case]["terms_top"]
            b = results["pure-python"][case]["terms_top"]
            assert a == b, f"backend term-count mismatch in {case}: {a} vs {b}"


if __name__ == "__main__":
    main()
