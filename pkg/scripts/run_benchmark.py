"""Reduced-scale Table 1 / Table 2 run for scenario 1 (or any scenario).

    python3 scripts/run_benchmark.py --out runs/s1 --n 400 --p 80 --k 10 --n-splits 20
"""

import argparse
import time

from orthogroups.benchmark import BenchmarkConfig, run_benchmark, write_benchmark
from orthogroups.simulate import ScenarioSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scenario", type=int, default=1)
    ap.add_argument("--n", type=int, default=400)
    ap.add_argument("--p", type=int, default=80)
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--n-splits", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--t", type=float)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    spec = ScenarioSpec(args.scenario, n=args.n, p=args.p, k=args.k, seed=args.seed, n_splits=args.n_splits)
    start = time.perf_counter()
    result = run_benchmark(BenchmarkConfig(spec=spec, t=args.t, jobs=args.jobs))
    write_benchmark(result, args.out)

    print(f"{spec.n_splits} splits in {time.perf_counter() - start:.1f}s, t = {result.config.t_value:.3f}")
    print(f"{'method':<6} {'metric':<5} {'mean':>10} {'sd':>10}")
    for method, metric, mean, sd, _ in result.table1():
        print(f"{method:<6} {metric:<5} {mean:10.4f} {sd:10.4f}")


if __name__ == "__main__":
    main()
