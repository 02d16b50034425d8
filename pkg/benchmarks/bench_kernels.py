"""Benchmark the compiled peeling kernels against the pure-Python fallback.

Runs the same seeded Monte Carlo workload under both backends (the pure one
in a subprocess with ``IRSA_FORCE_PURE=1``) and reports frames per second.

    python3 benchmarks/bench_kernels.py [--trials 2000]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def run_workload(trials: int) -> dict:
    from irsa import kernels, simulator
    from irsa.analysis import ClassSpec, ScenarioConfig
    from irsa.distributions import CATALOG

    cfg = ScenarioConfig(
        200,
        (
            ClassSpec(70, 0.7, CATALOG.get("e")),
            ClassSpec(70, 0.3, CATALOG.get("a")),
        ),
    )
    simulator.monte_carlo(cfg, 20, base_seed=0)  # warm-up
    start = time.perf_counter()
    report = simulator.monte_carlo(cfg, trials, base_seed=0)
    elapsed = time.perf_counter() - start
    return {
        "backend": kernels.BACKEND,
        "trials": trials,
        "seconds": elapsed,
        "frames_per_sec": trials / elapsed,
        "per_class_pe": report.per_class_pe,
    }


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=2000)
    parser.add_argument("--json", action="store_true", help="emit one JSON record")
    args = parser.parse_args()

    result = run_workload(args.trials)
    if args.json:
        print(json.dumps(result))
        return 0

    results = [result]
    if result["backend"] == "compiled":
        env = dict(os.environ, IRSA_FORCE_PURE="1")
        out = subprocess.run(
            [sys.executable, __file__, "--trials", str(args.trials), "--json"],
            env=env,
            capture_output=True,
            text=True,
            check=True,
        )
        results.append(json.loads(out.stdout))

    print(f"{'backend':<10} {'trials':>7} {'seconds':>9} {'frames/s':>10}")
    for r in results:
        print(
            f"{r['backend']:<10} {r['trials']:>7} {r['seconds']:>9.3f} "
            f"{r['frames_per_sec']:>10.1f}"
        )
    if len(results) == 2:
        if results[0]["per_class_pe"] != results[1]["per_class_pe"]:
            print("WARNING: backends disagree on decoded results")
            return 1
        speedup = results[0]["frames_per_sec"] / results[1]["frames_per_sec"]
        print(f"speedup: {speedup:.1f}x (identical per-class error rates)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
