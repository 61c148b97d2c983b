from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from reboot_bandit.envs import BanditInstance, Bernoulli, Gaussian, InstanceSpec, Logistic, ShiftedExponential, make_instance
from reboot_bandit.errors import ConfigurationError
from reboot_bandit.policies import PolicySpec
from reboot_bandit.sim import RunRecord, aggregate, instance_rng, mean_instance_gap, run_episode, run_many

MIXED = BanditInstance((Gaussian(0.3, 1.0), ShiftedExponential(0.5, 0.1), Logistic(0.5, 1.0), Bernoulli(0.7)))

# policies whose kernel consumes the random stream exactly like the reference loop
REPLAYABLE = ["reboot:1.5", "reboot-generic:1.5", "reboot-generic:0.8:rademacher", "vanilla-rb:rademacher",
              "ftl", "ts", "phe:2.1", "phe:2.1:scaled"]


@pytest.mark.parametrize("policy", REPLAYABLE)
def test_kernel_replays_reference_loop(policy):
    spec = PolicySpec.parse(policy)
    for seed in (0, 7):
        fast = run_episode(spec, MIXED, 300, seed)
        slow = run_episode(spec, MIXED, 300, seed, engine="python")
        np.testing.assert_array_equal(fast.pull_counts, slow.pull_counts)
        np.testing.assert_allclose(fast.cumulative_pseudo_regret, slow.cumulative_pseudo_regret, rtol=0, atol=1e-9)


@pytest.mark.parametrize("policy", ["giro:1", "vanilla-rb"])
def test_kernel_matches_reference_in_distribution(policy):
    # these kernels sample the same law through a different sequence of draws
    spec = PolicySpec.parse(policy)
    inst = BanditInstance((Bernoulli(0.6), Bernoulli(0.4), Bernoulli(0.5)))
    runs = 150
    fast = np.array([run_episode(spec, inst, 60, s).final_regret for s in range(runs)])
    slow = np.array([run_episode(spec, inst, 60, 10_000 + s, engine="python").final_regret for s in range(runs)])
    se = np.sqrt(fast.var(ddof=1) / runs + slow.var(ddof=1) / runs)
    assert abs(fast.mean() - slow.mean()) < 4 * se


def test_initialization_round_robin():
    rec = run_episode(PolicySpec.parse("ftl"), MIXED, 4, 0)
    np.testing.assert_array_equal(rec.pull_counts, [1, 1, 1, 1])


@pytest.mark.parametrize("policy", ["reboot", "giro:1", "ts"])
def test_regret_identity_and_monotone(policy):
    rec = run_episode(PolicySpec.parse(policy), MIXED, 500, 3)
    assert rec.pull_counts.sum() == 500
    assert rec.final_regret == pytest.approx(float(MIXED.gaps @ rec.pull_counts))
    assert np.all(np.diff(rec.cumulative_pseudo_regret) >= 0)
    assert rec.cumulative_pseudo_regret[0] >= 0


def test_deterministic_in_seed():
    spec = PolicySpec.parse("reboot")
    a, b = run_episode(spec, MIXED, 400, 11), run_episode(spec, MIXED, 400, 11)
    assert a.same_trajectory(b)
    assert not a.same_trajectory(run_episode(spec, MIXED, 400, 12))


def test_horizon_shorter_than_arms():
    with pytest.raises(ConfigurationError):
        run_episode(PolicySpec.parse("ts"), MIXED, 3, 0)


def test_unknown_engine():
    with pytest.raises(ConfigurationError):
        run_episode(PolicySpec.parse("ts"), MIXED, 10, 0, engine="gpu")


def test_two_arm_identical_means_gives_zero_regret():
    inst = BanditInstance((Gaussian(0.0), Gaussian(0.0)))
    assert run_episode(PolicySpec.parse("reboot"), inst, 200, 0).final_regret == 0.0


def test_run_many_independent_of_workers():
    spec = PolicySpec.parse("reboot")
    inst = InstanceSpec("gaussian-unif", {"k": 5})
    serial = run_many(spec, inst, 200, 6, seed=4, workers=1)
    pooled = run_many(spec, inst, 200, 6, seed=4, workers=3)
    assert all(x.same_trajectory(y) for x, y in zip(serial, pooled))


def test_run_many_redraws_instance_per_run():
    inst = InstanceSpec("gaussian-unif")
    a = make_instance(inst, instance_rng(0))
    b = make_instance(inst, instance_rng(1))
    assert not np.array_equal(a.means, b.means)
    assert mean_instance_gap(inst, 3, seed=0) == pytest.approx(
        np.mean([make_instance(inst, instance_rng(i)).gaps.mean() for i in range(3)])
    )


def test_policies_share_instances_per_seed():
    # the instance stream does not depend on the policy, so comparisons are paired
    inst = InstanceSpec("gaussian-unif", {"k": 3})
    for policy in ("ftl", "giro:1"):
        recs = run_many(PolicySpec.parse(policy), inst, 50, 2, seed=0)
        for i, r in enumerate(recs):
            gaps = make_instance(inst, instance_rng(i)).gaps
            assert r.final_regret == pytest.approx(float(gaps @ r.pull_counts))


def _rec(values):
    return RunRecord(np.asarray(values, dtype=float), np.zeros(2, dtype=np.int64))


def test_aggregate_known_values():
    curve = aggregate([_rec([0, 1, 3]), _rec([0, 3, 5])])
    np.testing.assert_allclose(curve.mean_regret, [0, 2, 4])
    np.testing.assert_allclose(curve.stderr, [0, 1, 1])
    assert curve.n_runs == 2 and curve.final == (4.0, 1.0)


@given(st.lists(st.lists(st.floats(0, 1e4), min_size=5, max_size=5), min_size=2, max_size=12), st.randoms())
def test_aggregate_order_invariant(rows, rnd):
    recs = [_rec(r) for r in rows]
    shuffled = recs[:]
    rnd.shuffle(shuffled)
    a, b = aggregate(recs), aggregate(shuffled)
    assert np.array_equal(a.mean_regret, b.mean_regret) and np.array_equal(a.stderr, b.stderr)
    np.testing.assert_allclose(a.mean_regret, np.mean(rows, axis=0), rtol=1e-12, atol=1e-9)


def test_aggregate_rejects_bad_input():
    with pytest.raises(ValueError):
        aggregate([_rec([1, 2])])
    with pytest.raises(ValueError):
        aggregate([_rec([1, 2]), _rec([1, 2, 3])])
