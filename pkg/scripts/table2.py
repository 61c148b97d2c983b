"""Median wall-clock time per episode for TS, Giro, PHE and ReBoot."""
import argparse
from pathlib import Path

from reboot_bandit import experiments

if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("results/table2.csv"))
    args = p.parse_args()
    res = experiments.run_benchmarks(experiments.TABLE2_POLICIES, (5, 10, 20), (1_000, 10_000), args.reps, args.seed)
    print(experiments.format_benchmarks(res))
    args.out.parent.mkdir(parents=True, exist_ok=True)
    experiments.write_benchmarks_csv(args.out, res)
