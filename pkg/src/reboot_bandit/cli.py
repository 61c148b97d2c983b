"""Command line entry point: ``run``, ``bench`` and ``theory`` subcommands.

Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import experiments
from .errors import ConfigurationError, TheoryDomainError
from .policies import PolicySpec
from .theory import theory_report

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(x)) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="reboot-bandit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run an experiment config or preset and write CSVs")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path, help="JSON experiment config")
    src.add_argument("--preset", choices=experiments.PRESETS, help="named preset (same as a config with only 'preset')")
    r.add_argument("--runs", type=int, help="number of independent runs (default 500)")
    r.add_argument("--horizon", type=int, help="override the horizon T")
    r.add_argument("--seed", type=int, help="master seed; run i uses seed + i")
    r.add_argument("--workers", type=int, help="worker threads for episodes")
    r.add_argument("--out", type=Path, default=Path("results"), help="output directory")

    b = sub.add_parser("bench", help="time policies on a fixed Gaussian instance")
    b.add_argument("--arms", type=_int_list, default=[10], help="K, or a comma list")
    b.add_argument("--horizon", type=_int_list, default=[10_000], help="T, or a comma list")
    b.add_argument("--policies", default=",".join(experiments.TABLE2_POLICIES), help="comma list, e.g. ts,giro:1,phe:2.1,reboot:1.5")
    b.add_argument("--reps", type=int, default=5)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", type=Path, help="also write the timings as CSV")

    t = sub.add_parser("theory", help="evaluate regret-bound constants and tail-inequality checks")
    t.add_argument("--sigma-a", type=float, required=True)
    t.add_argument("--horizon", type=float, required=True)
    t.add_argument("--gap", type=_float_list, default=[1.0], help="suboptimality gap(s), comma list")
    t.add_argument("--format", choices=("text", "json"), default="text")
    t.add_argument("--out", type=Path, help="also write the JSON report here")
    return p


def _cmd_run(args) -> int:
    if args.config is not None:
        cfg = experiments.load_config(args.config)
    else:
        cfg = experiments.preset(args.preset)
    overrides = {k: v for k, v in (("n_runs", args.runs), ("horizon", args.horizon),
                                    ("seed", args.seed), ("workers", args.workers)) if v is not None}
    cfg = replace(cfg, **overrides)

    if cfg.is_benchmark:
        pols = [p for v in cfg.variants for p in v.policies]
        res = experiments.run_benchmarks(pols, cfg.bench_arms, cfg.bench_horizons, cfg.bench_reps, cfg.seed)
        args.out.mkdir(parents=True, exist_ok=True)
        experiments.write_benchmarks_csv(args.out / "table2.csv", res)
        print(experiments.format_benchmarks(res))
        return EXIT_OK

    results = experiments.run_experiment(cfg, args.out)
    print(experiments.format_summary(results))
    print(f"wrote {len(results)} CSV files and summary.json to {args.out}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    specs = [PolicySpec.parse(p) for p in args.policies.split(",") if p.strip()]
    if not specs:
        raise ConfigurationError("no policies given")
    if args.reps < 1:
        raise ConfigurationError("--reps must be >= 1")
    res = experiments.run_benchmarks(specs, args.arms, args.horizon, args.reps, args.seed)
    print(experiments.format_benchmarks(res))
    if args.out:
        experiments.write_benchmarks_csv(args.out, res)
    return EXIT_OK


def _cmd_theory(args) -> int:
    report = theory_report(args.sigma_a, args.horizon, args.gap)
    payload = json.dumps(report.to_dict(), indent=2)
    print(payload if args.format == "json" else report.format())
    if args.out:
        args.out.write_text(payload + "\n")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "bench": _cmd_bench, "theory": _cmd_theory}[args.command]
    try:
        return handler(args)
    except (ConfigurationError, TheoryDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
