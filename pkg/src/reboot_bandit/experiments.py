"""Experiment configurations, named presets and the CSV/summary writer."""
from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping, Optional

from .envs import InstanceSpec
from .errors import ConfigurationError
from .policies import PolicySpec
from .sim import BenchmarkResult, RegretCurve, aggregate, benchmark, run_many

DEFAULT_RUNS = 500
DEFAULT_HORIZON = 10_000

FIGURE3_POLICIES = ("ts", "giro:1", "phe:2.1", "reboot:1.0", "reboot:1.5")
TABLE2_POLICIES = ("ts", "giro:1", "phe:2.1", "reboot:1.5")


@dataclass(frozen=True)
class Variant:
    label: str
    instance: InstanceSpec
    policies: tuple


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    variants: tuple = ()
    horizon: int = DEFAULT_HORIZON
    n_runs: int = DEFAULT_RUNS
    seed: int = 0
    workers: int = 1
    # timing grid; only used by the table2 preset
    bench_arms: tuple = ()
    bench_horizons: tuple = ()
    bench_reps: int = 5

    def __post_init__(self):
        if self.is_benchmark:
            if not self.bench_horizons or not self.bench_arms:
                raise ConfigurationError("benchmark config needs arms and horizons")
            return
        if not self.variants:
            raise ConfigurationError("config defines no instance/policies")
        if self.n_runs < 2:
            raise ConfigurationError(f"n_runs must be >= 2 for a standard error, got {self.n_runs}")
        for v in self.variants:
            if not v.policies:
                raise ConfigurationError(f"variant {v.label!r} has no policies")
        if self.horizon < 1:
            raise ConfigurationError("horizon must be positive")

    @property
    def is_benchmark(self) -> bool:
        return bool(self.bench_arms)


def _policies(items) -> tuple:
    return tuple(p if isinstance(p, PolicySpec) else PolicySpec.from_dict(p) for p in items)


def _single(name, instance, policies, **kw) -> ExperimentConfig:
    return ExperimentConfig(name, (Variant("main", InstanceSpec.from_dict(instance), _policies(policies)),), **kw)


def preset(name: str) -> ExperimentConfig:
    """The experiment behind each figure/table, at full default scale (500 runs, T = 10,000)."""
    if name == "figure1":
        return _single(name, {"preset": "gaussian-unif", "k": 10, "low": -1.0, "high": 1.0},
                       ["ftl", "vanilla-rb", "reboot:1.5"])
    if name == "figure2-shift":
        variants = tuple(
            Variant(f"c={c:g}", InstanceSpec("two-arm-shift", {"c": float(c)}), _policies(["reboot:1.5", "giro:1", "phe:2.1"]))
            for c in (0, 5, 10, 15, 20)
        )
        return ExperimentConfig(name, variants)
    if name == "figure2-scale":
        variants = tuple(
            Variant(
                f"sigma={s:g}",
                InstanceSpec("two-arm-scale", {"sigma": float(s)}),
                (PolicySpec("reboot", sigma_a=1.5 * s, label="reboot-1.5sigma"),) + _policies(["giro:1", "phe:2.1"]),
            )
            for s in (1, 5, 10, 15, 20)
        )
        return ExperimentConfig(name, variants)
    if name == "figure3-gaussian":
        return _single(name, {"preset": "gaussian-unif", "k": 10}, FIGURE3_POLICIES)
    if name == "figure3-exponential":
        return _single(name, {"preset": "exp-shifted", "k": 10}, FIGURE3_POLICIES)
    if name == "figure3-logistic":
        return _single(name, {"preset": "logistic-unif", "k": 10}, FIGURE3_POLICIES)
    if name == "table2":
        return ExperimentConfig(
            name,
            (Variant("bench", InstanceSpec("gaussian-unif"), _policies(TABLE2_POLICIES)),),
            bench_arms=(5, 10, 20),
            bench_horizons=(1_000, 10_000),
        )
    raise ConfigurationError(f"unknown experiment preset {name!r}; known: {', '.join(PRESETS)}")


PRESETS = (
    "figure1",
    "figure2-shift",
    "figure2-scale",
    "figure3-gaussian",
    "figure3-exponential",
    "figure3-logistic",
    "table2",
)


def config_from_dict(d: Mapping[str, Any]) -> ExperimentConfig:
    """Build a config from parsed JSON.

    Either name a ``preset`` (other keys override it), or give ``instance`` +
    ``policies``, or a list of ``variants`` each with label/instance/policies.
    """
    d = dict(d)
    known = {"preset", "name", "instance", "policies", "variants", "horizon", "n_runs", "seed", "workers",
             "bench_arms", "bench_horizons", "bench_reps"}
    extra = set(d) - known
    if extra:
        raise ConfigurationError(f"unknown config keys: {sorted(extra)}")

    base = preset(d["preset"]) if "preset" in d else None
    variants = base.variants if base else ()
    if "variants" in d:
        variants = tuple(
            Variant(str(v.get("label", f"v{i}")), InstanceSpec.from_dict(v["instance"]), _policies(v["policies"]))
            for i, v in enumerate(d["variants"])
        )
    elif "instance" in d or "policies" in d:
        inst = InstanceSpec.from_dict(d["instance"]) if "instance" in d else (variants[0].instance if variants else None)
        pols = _policies(d["policies"]) if "policies" in d else (variants[0].policies if variants else ())
        if inst is None:
            raise ConfigurationError("config has policies but no instance")
        variants = (Variant("main", inst, pols),)

    kw = {}
    for key in ("horizon", "n_runs", "seed", "workers", "bench_reps"):
        if key in d:
            kw[key] = int(d[key])
    for key in ("bench_arms", "bench_horizons"):
        if key in d:
            kw[key] = tuple(int(x) for x in d[key])
    name = d.get("name", base.name if base else "custom")
    if base:
        return replace(base, name=name, variants=variants, **kw)
    return ExperimentConfig(name, variants, **kw)


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    text = path.read_text()  # OSError propagates to the caller as an I/O failure
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: top level must be an object")
    try:
        return config_from_dict(data)
    except (KeyError, TypeError) as exc:
        raise ConfigurationError(f"{path}: malformed config ({exc!r})") from None


def _slug(text: str) -> str:
    return "".join(ch if ch.isalnum() or ch in ".-_" else "_" for ch in text)


def write_curve_csv(path: Path, curve: RegretCurve) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["round", "mean_regret", "stderr"])
        for t, (m, se) in enumerate(zip(curve.mean_regret, curve.stderr), start=1):
            w.writerow([t, f"{m:.10g}", f"{se:.10g}"])


@dataclass
class PolicyResult:
    variant: str
    policy: str
    curve: RegretCurve
    total_wall_time: float
    csv_path: Optional[Path] = None


def run_experiment(config: ExperimentConfig, out_dir: str | Path | None = None) -> list[PolicyResult]:
    """Run every (variant, policy) pair; write CSVs and a summary when ``out_dir`` is set."""
    if config.is_benchmark:
        raise ConfigurationError("benchmark presets are run with run_benchmarks")
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    results = []
    for v in config.variants:
        for spec in v.policies:
            t0 = time.perf_counter()
            records = run_many(spec, v.instance, config.horizon, config.n_runs, config.seed, config.workers)
            elapsed = time.perf_counter() - t0
            res = PolicyResult(v.label, spec.name, aggregate(records), elapsed)
            if out is not None:
                stem = spec.name if len(config.variants) == 1 else f"{v.label}__{spec.name}"
                res.csv_path = out / f"{_slug(stem)}.csv"
                write_curve_csv(res.csv_path, res.curve)
            results.append(res)
    if out is not None:
        write_summary(out / "summary.json", config, results)
    return results


def write_summary(path: Path, config: ExperimentConfig, results: list[PolicyResult]) -> None:
    rows = []
    for r in results:
        m, se = r.curve.final
        rows.append({
            "variant": r.variant,
            "policy": r.policy,
            "final_mean_regret": m,
            "final_stderr": se,
            "n_runs": r.curve.n_runs,
            "wall_time_total_s": r.total_wall_time,
            "csv": r.csv_path.name if r.csv_path else None,
        })
    payload = {
        "experiment": config.name,
        "horizon": config.horizon,
        "n_runs": config.n_runs,
        "seed": config.seed,
        "results": rows,
    }
    path.write_text(json.dumps(payload, indent=2) + "\n")


def format_summary(results: list[PolicyResult]) -> str:
    lines = [f"{'variant':<12} {'policy':<24} {'final regret':>14} {'stderr':>10} {'wall s':>8}"]
    for r in results:
        m, se = r.curve.final
        lines.append(f"{r.variant:<12} {r.policy:<24} {m:>14.2f} {se:>10.2f} {r.total_wall_time:>8.2f}")
    return "\n".join(lines)


def run_benchmarks(
    policies, arms=(5, 10, 20), horizons=(1_000, 10_000), n_reps: int = 5, seed: int = 0
) -> list[BenchmarkResult]:
    return [
        benchmark(spec, k, t, n_reps, seed)
        for t in horizons
        for k in arms
        for spec in _policies(policies)
    ]


def format_benchmarks(results: list[BenchmarkResult]) -> str:
    names = list(dict.fromkeys(r.policy for r in results))
    header = f"{'K':>4} {'T':>7} | " + " ".join(f"{n:>12}" for n in names)
    lines = [header, "-" * len(header)]
    cells = {(r.n_arms, r.horizon, r.policy): r.median for r in results}
    for k, t in dict.fromkeys((r.n_arms, r.horizon) for r in results):
        lines.append(f"{k:>4} {t:>7} | " + " ".join(f"{cells[(k, t, n)]:>12.4f}" for n in names))
    return "\n".join(lines)


def write_benchmarks_csv(path: Path, results: list[BenchmarkResult]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n_arms", "horizon", "policy", "median_seconds", "n_reps"])
        for r in results:
            w.writerow([r.n_arms, r.horizon, r.policy, f"{r.median:.6g}", len(r.times)])
