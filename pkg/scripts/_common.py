"""Shared argument handling for the reproduction scripts."""
from __future__ import annotations

import argparse
from dataclasses import replace
from pathlib import Path

from reboot_bandit import experiments


def parser(description: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--runs", type=int, default=experiments.DEFAULT_RUNS)
    p.add_argument("--horizon", type=int, default=experiments.DEFAULT_HORIZON)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, default=Path("results"))
    return p


def run_presets(names, args) -> None:
    for name in names:
        cfg = replace(experiments.preset(name), n_runs=args.runs, horizon=args.horizon,
                      seed=args.seed, workers=args.workers)
        out = args.out / name
        results = experiments.run_experiment(cfg, out)
        print(f"== {name} -> {out}")
        print(experiments.format_summary(results))
