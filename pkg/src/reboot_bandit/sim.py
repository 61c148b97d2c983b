"""Episode runner, regret accounting, cross-run aggregation and timing."""
from __future__ import annotations

import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import _kernels
from .envs import BanditInstance, InstanceSpec, make_instance
from .errors import ConfigurationError
from .policies import PolicySpec, PolicyState, select_arm


@dataclass(eq=False)
class RunRecord:
    cumulative_pseudo_regret: np.ndarray
    pull_counts: np.ndarray
    wall_time: float = field(default=0.0)

    @property
    def horizon(self) -> int:
        return len(self.cumulative_pseudo_regret)

    @property
    def final_regret(self) -> float:
        return float(self.cumulative_pseudo_regret[-1])

    def same_trajectory(self, other: "RunRecord") -> bool:
        """Bitwise equality of everything except wall time."""
        return (
            np.array_equal(self.cumulative_pseudo_regret, other.cumulative_pseudo_regret)
            and np.array_equal(self.pull_counts, other.pull_counts)
        )


@dataclass
class RegretCurve:
    mean_regret: np.ndarray
    stderr: np.ndarray
    n_runs: int

    @property
    def final(self) -> tuple[float, float]:
        return float(self.mean_regret[-1]), float(self.stderr[-1])


def _check_horizon(instance: BanditInstance, horizon: int) -> None:
    if horizon < instance.n_arms:
        raise ConfigurationError(
            f"horizon T={horizon} is shorter than the {instance.n_arms} initialization rounds"
        )


def run_episode_python(spec: PolicySpec, instance: BanditInstance, horizon: int, seed) -> RunRecord:
    """Reference interaction loop built directly on ``select_arm``.

    Slow (one Python call per arm per round); kept as an executable statement of
    the algorithm that the jitted kernel is checked against.
    """
    _check_horizon(instance, horizon)
    rng = np.random.default_rng(seed)
    K = instance.n_arms
    state = PolicyState.empty(K, spec)
    counts = np.zeros(K, dtype=np.int64)
    regret = np.empty(horizon)
    t0 = time.perf_counter()
    for t in range(horizon):
        arm = t if t < K else select_arm(state, spec, rng)
        state.observe(arm, instance.arms[arm].sample(rng))
        counts[arm] += 1
        reg = 0.0
        for k in range(K):
            reg += instance.gaps[k] * counts[k]
        regret[t] = reg
    return RunRecord(regret, counts, time.perf_counter() - t0)


def run_episode(
    spec: PolicySpec, instance: BanditInstance, horizon: int, seed, engine: str = "kernel"
) -> RunRecord:
    """Play ``horizon`` rounds: arms 1..K once each, then follow the policy's argmax.

    Regret is gap-weighted pull counts (pseudo-regret). Deterministic in
    ``(spec, instance, horizon, seed)``.
    """
    if engine == "python":
        return run_episode_python(spec, instance, horizon, seed)
    if engine != "kernel":
        raise ConfigurationError(f"unknown engine {engine!r}")
    _check_horizon(instance, horizon)
    rng = np.random.default_rng(seed)
    kinds, p1, p2 = instance.kernel_arrays()
    t0 = time.perf_counter()
    regret, counts = _kernels.run_episode_kernel(
        spec.kind.code,
        float(spec.sigma_a or 0.0),
        float(spec.a or 0.0),
        spec.weight_dist.code,
        spec.phe_normalization == "scaled",
        kinds,
        p1,
        p2,
        np.ascontiguousarray(instance.gaps, dtype=float),
        int(horizon),
        rng,
    )
    return RunRecord(regret, counts, time.perf_counter() - t0)


def run_seed(master_seed: int, run_index: int) -> int:
    return int(master_seed) + int(run_index)


def instance_rng(seed: int) -> np.random.Generator:
    # separate stream from the episode's, so every policy faces the same instance
    return np.random.default_rng([int(seed), 1])


def run_many(
    spec: PolicySpec,
    instance: InstanceSpec | BanditInstance,
    horizon: int,
    n_runs: int,
    seed: int = 0,
    workers: int = 1,
    engine: str = "kernel",
) -> list[RunRecord]:
    """Independent episodes with seeds ``seed + i``.

    A random-mean preset is redrawn per run from that run's seed. Results do
    not depend on ``workers``.
    """

    def one(i: int) -> RunRecord:
        rs = run_seed(seed, i)
        inst = instance if isinstance(instance, BanditInstance) else make_instance(instance, instance_rng(rs))
        return run_episode(spec, inst, horizon, rs, engine=engine)

    if workers <= 1:
        return [one(i) for i in range(n_runs)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(n_runs)))


def aggregate(records: Iterable[RunRecord]) -> RegretCurve:
    """Per-round mean regret and standard error of the mean across runs.

    Values are sorted per round before reduction so the result does not
    depend on record order (or on how runs were scheduled).
    """
    records = list(records)
    if len(records) < 2:
        raise ValueError("need at least 2 runs for a standard error")
    horizons = {r.horizon for r in records}
    if len(horizons) != 1:
        raise ValueError(f"records have mismatched horizons {sorted(horizons)}")
    R = np.sort(np.stack([r.cumulative_pseudo_regret for r in records]), axis=0)
    n = R.shape[0]
    mean = R.sum(axis=0) / n
    var = ((R - mean) ** 2).sum(axis=0) / (n - 1)
    return RegretCurve(mean, np.sqrt(var / n), n)


def mean_instance_gap(instance: InstanceSpec | BanditInstance, n_runs: int, seed: int = 0) -> float:
    """Average over runs of the mean gap across arms (for growth-rate checks)."""
    if isinstance(instance, BanditInstance):
        return float(instance.gaps.mean())
    return float(np.mean([make_instance(instance, instance_rng(run_seed(seed, i))).gaps.mean() for i in range(n_runs)]))


@dataclass
class BenchmarkResult:
    policy: str
    n_arms: int
    horizon: int
    times: list

    @property
    def median(self) -> float:
        return statistics.median(self.times)


def benchmark_instance(n_arms: int, seed: int = 0) -> BanditInstance:
    """Fixed Gaussian instance for timing: means ~ Unif(0, 1), unit variance."""
    return make_instance(InstanceSpec("gaussian-unif", {"k": n_arms, "low": 0.0, "high": 1.0}), np.random.default_rng(seed))


def benchmark(spec: PolicySpec, n_arms: int, horizon: int, n_reps: int = 5, seed: int = 0) -> BenchmarkResult:
    """Median wall time of ``n_reps`` episodes on a fixed Gaussian instance."""
    if n_reps < 1:
        raise ConfigurationError("n_reps must be at least 1")
    inst = benchmark_instance(n_arms, seed)
    run_episode(spec, inst, inst.n_arms + 1, seed)  # JIT warm-up, not timed
    times = []
    for i in range(n_reps):
        t0 = time.perf_counter()
        run_episode(spec, inst, horizon, run_seed(seed, i))
        times.append(time.perf_counter() - t0)
    return BenchmarkResult(spec.name, n_arms, horizon, times)
