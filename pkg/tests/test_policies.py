from __future__ import annotations

import itertools
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats as sps

from reboot_bandit.armstats import ArmStats, index_variance
from reboot_bandit.errors import ConfigurationError, UndefinedStatisticError
from reboot_bandit.policies import (
    PolicyKind,
    PolicySpec,
    PolicyState,
    argmax_random_tiebreak,
    ftl_index,
    giro_index,
    giro_pseudo_count,
    phe_index,
    phe_pseudo_count,
    reboot_index_gaussian,
    reboot_index_generic,
    select_arm,
    ts_gaussian_index,
    vanilla_rb_index,
)

N = 100_000
histories = st.lists(st.floats(min_value=-50, max_value=50, allow_nan=False), min_size=1, max_size=30)


# ---- ReBoot -----------------------------------------------------------------

def test_pinned_weights_recover_components():
    y = [1.0, 2.0, 6.0]
    s, ybar, sa = 3, 3.0, 0.5
    e_plus = math.sqrt(s + 2) * sa
    assert reboot_index_generic(y, sa, "gaussian", None, weights=np.ones(s + 2)) == pytest.approx(ybar)
    assert reboot_index_generic(y, sa, "gaussian", None, weights=np.zeros(s + 2)) == ybar
    w = np.zeros(s + 2)
    w[s] = 1.0
    assert reboot_index_generic(y, sa, "gaussian", None, weights=w) == pytest.approx(ybar + e_plus / (s + 2))
    w = np.zeros(s + 2)
    w[2] = 1.0
    assert reboot_index_generic(y, sa, "gaussian", None, weights=w) == pytest.approx(ybar + 3.0 / (s + 2))


def test_pinned_weights_wrong_length():
    with pytest.raises(ValueError):
        reboot_index_generic([1.0, 2.0], 1.0, "gaussian", None, weights=np.ones(3))


@pytest.mark.parametrize("dist", ["gaussian", "rademacher"])
@pytest.mark.parametrize("y", [[0.3], [1.0, -2.0, 0.5, 4.0], list(np.linspace(-1, 3, 25))])
def test_generic_index_moments(y, dist, rng):
    sa = 1.5
    target_var = index_variance(ArmStats.from_rewards(y), sa)
    draws = reboot_index_generic(y, sa, dist, rng, size=N)
    assert abs(draws.mean() - np.mean(y)) < 5 * math.sqrt(target_var / N)
    assert draws.var() == pytest.approx(target_var, rel=0.02)


def test_fast_path_is_normal_with_eq_variance(rng):
    y = [0.2, 1.4, -0.7, 2.2]
    stats = ArmStats.from_rewards(y)
    draws = reboot_index_gaussian(stats, 1.5, rng, size=N)
    ref = sps.norm(np.mean(y), math.sqrt(index_variance(stats, 1.5)))
    assert sps.kstest(draws, ref.cdf).pvalue > 1e-4


def test_fast_and_generic_agree_in_law(rng):
    y = [3.0, 1.0, 2.5, 0.0, -1.0, 4.0]
    a = reboot_index_gaussian(ArmStats.from_rewards(y), 1.0, rng, size=20_000)
    b = reboot_index_generic(y, 1.0, "gaussian", rng, size=20_000)
    assert sps.ks_2samp(a, b).pvalue > 1e-4


def test_vectorised_draws_equal_repeated_calls():
    y = [1.0, 2.0, 4.0]
    many = reboot_index_generic(y, 1.5, "rademacher", np.random.default_rng(9), size=6)
    g = np.random.default_rng(9)
    one_by_one = [reboot_index_generic(y, 1.5, "rademacher", g) for _ in range(6)]
    np.testing.assert_allclose(many, one_by_one, rtol=0, atol=1e-12)


@given(histories, st.floats(min_value=-1e3, max_value=1e3), st.integers(0, 2**32 - 1))
def test_shift_equivariance(y, c, seed):
    base = ArmStats.from_rewards(y)
    moved = ArmStats.from_rewards([v + c for v in y])
    i0 = reboot_index_gaussian(base, 1.5, np.random.default_rng(seed))
    i1 = reboot_index_gaussian(moved, 1.5, np.random.default_rng(seed))
    assert i1 - i0 == pytest.approx(c, abs=1e-6 * (1 + abs(c) + max(abs(v) for v in y)))
    g0 = reboot_index_generic(y, 1.5, "rademacher", np.random.default_rng(seed))
    g1 = reboot_index_generic([v + c for v in y], 1.5, "rademacher", np.random.default_rng(seed))
    assert g1 - g0 == pytest.approx(c, abs=1e-6 * (1 + abs(c) + max(abs(v) for v in y)))


@given(histories, st.floats(min_value=0.1, max_value=20), st.integers(0, 2**32 - 1))
def test_scale_equivariance_with_matched_sigma_a(y, k, seed):
    # multiplying rewards and sigma_a by k multiplies the index by k
    i0 = reboot_index_generic(y, 1.5, "gaussian", np.random.default_rng(seed))
    i1 = reboot_index_generic([k * v for v in y], 1.5 * k, "gaussian", np.random.default_rng(seed))
    assert i1 == pytest.approx(k * i0, rel=1e-9, abs=1e-9 * k * (1 + max(abs(v) for v in y)))


def test_reboot_undefined_before_first_pull(rng):
    with pytest.raises(UndefinedStatisticError):
        reboot_index_gaussian(ArmStats(), 1.0, rng)
    with pytest.raises(UndefinedStatisticError):
        reboot_index_generic([], 1.0, "gaussian", rng)


# ---- vanilla RB, FTL, TS ------------------------------------------------------

def test_vanilla_rb_collapses_on_single_sample(rng):
    # one observation: the only residual is zero, so there is no exploration at all
    assert vanilla_rb_index([2.5], "gaussian", rng) == 2.5


@pytest.mark.parametrize("dist", ["gaussian", "rademacher"])
def test_vanilla_rb_variance(dist, rng):
    y = [1.0, 3.0, 5.0]
    draws = vanilla_rb_index(y, dist, rng, size=N)
    assert draws.var() == pytest.approx(8.0 / 9.0, rel=0.02)


def test_ftl_is_sample_mean():
    assert ftl_index(ArmStats.from_rewards([1.0, 2.0, 6.0])) == 3.0


def test_ts_posterior_moments(rng):
    stats = ArmStats.from_rewards([1.0, 2.0, 0.0, 5.0])
    draws = ts_gaussian_index(stats, rng, size=N)
    assert draws.mean() == pytest.approx(8.0 / 5.0, abs=5 * math.sqrt(0.2 / N))
    assert draws.var() == pytest.approx(0.2, rel=0.02)


def test_ts_prior_draw_defined_at_zero_pulls(rng):
    assert math.isfinite(ts_gaussian_index(ArmStats(), rng))


# ---- Giro -------------------------------------------------------------------

def test_giro_pseudo_count():
    assert giro_pseudo_count(1, 4) == 4
    assert giro_pseudo_count(2, 3) == 6


def test_giro_matches_exhaustive_enumeration(rng):
    # history [1] with a=1 augments to [1, 0, 1]; all 27 resamples are equally likely
    aug = (1.0, 0.0, 1.0)
    exact = Counter(round(sum(aug[i] for i in idx) / 3, 9) for idx in itertools.product(range(3), repeat=3))
    draws = giro_index([1.0], 1, rng, size=N)
    observed = Counter(np.round(draws, 9))
    assert set(observed) == set(exact)
    f_obs = np.array([observed[k] for k in sorted(exact)])
    f_exp = np.array([exact[k] / 27 * N for k in sorted(exact)])
    assert sps.chisquare(f_obs, f_exp).pvalue > 1e-4
    assert draws.mean() == pytest.approx(2 / 3, abs=0.005)


def test_giro_mean_is_augmented_mean(rng):
    y = [0.2, 0.9, 0.4]
    draws = giro_index(y, 2, rng, size=N)
    assert draws.mean() == pytest.approx((sum(y) + 6) / 15, abs=0.003)


def test_giro_rejects_fractional_a(rng):
    with pytest.raises(ConfigurationError):
        giro_index([1.0], 1.5, rng)


# ---- PHE --------------------------------------------------------------------

def test_phe_pseudo_count_ceiling():
    assert phe_pseudo_count(2.1, 1) == 3
    assert phe_pseudo_count(2.1, 10) == 21
    assert phe_pseudo_count(2.0, 5) == 10


@pytest.mark.parametrize("norm,denom", [("augmented", 4.0), ("scaled", 3.1)])
def test_phe_matches_binomial_enumeration(norm, denom, rng):
    # s=1, sum=1, a=2.1 -> three fair pseudo coins
    stats = ArmStats.from_rewards([1.0])
    draws = phe_index(stats, 2.1, rng, normalization=norm, size=N)
    support = {u: math.comb(3, u) / 8 for u in range(4)}
    values = np.round(draws * denom - 1.0).astype(int)
    assert set(np.unique(values)) <= set(support)
    f_obs = np.bincount(values, minlength=4)
    f_exp = np.array([support[u] * N for u in range(4)])
    assert sps.chisquare(f_obs, f_exp).pvalue > 1e-4


def test_phe_unknown_normalization(rng):
    with pytest.raises(ConfigurationError):
        phe_index(ArmStats.from_rewards([1.0]), 2.1, rng, normalization="other")


# ---- argmax and selection ---------------------------------------------------

def test_argmax_unique_consumes_no_randomness():
    g = np.random.default_rng(1)
    assert argmax_random_tiebreak([0.1, 0.7, 0.3], g) == 1
    assert g.random() == np.random.default_rng(1).random()


def test_argmax_ties_uniform(rng):
    picks = Counter(argmax_random_tiebreak([1.0, 3.0, 3.0, 0.0, 3.0], rng) for _ in range(30_000))
    assert set(picks) == {1, 2, 4}
    assert sps.chisquare([picks[1], picks[2], picks[4]]).pvalue > 1e-4


def test_select_arm_follows_ftl_leader(rng):
    spec = PolicySpec.parse("ftl")
    state = PolicyState.empty(3, spec)
    for arm, r in [(0, 0.1), (1, 0.9), (2, 0.5)]:
        state.observe(arm, r)
    assert select_arm(state, spec, rng) == 1
    assert state.total_pulls == 3


# ---- specs ------------------------------------------------------------------

@pytest.mark.parametrize(
    "text,kind,name",
    [
        ("reboot", PolicyKind.REBOOT_GAUSSIAN, "reboot-1.5"),
        ("reboot:1.7", PolicyKind.REBOOT_GAUSSIAN, "reboot-1.7"),
        ("reboot-generic:1.5:rademacher", PolicyKind.REBOOT_GENERIC, "reboot-generic-1.5-rademacher"),
        ("vanilla-rb", PolicyKind.VANILLA_RB, "vanilla-rb"),
        ("vanilla-rb:rademacher", PolicyKind.VANILLA_RB, "vanilla-rb-rademacher"),
        ("ftl", PolicyKind.FTL, "ftl"),
        ("ts", PolicyKind.GAUSSIAN_TS, "ts"),
        ("giro:1", PolicyKind.GIRO, "giro-1"),
        ("phe:2.1", PolicyKind.PHE, "phe-2.1"),
        ("phe:2.1:scaled", PolicyKind.PHE, "phe-2.1-scaled"),
    ],
)
def test_parse_and_roundtrip(text, kind, name):
    spec = PolicySpec.parse(text)
    assert spec.kind is kind
    assert spec.name == name
    assert PolicySpec.from_dict(spec.to_dict()) == spec


@pytest.mark.parametrize("text", ["ucb", "reboot:0", "reboot:-1", "giro:1.5", "phe:0", "ftl:3", "reboot:abc", "phe:2:bogus"])
def test_parse_rejects(text):
    with pytest.raises(ConfigurationError):
        PolicySpec.parse(text)


def test_history_only_where_needed():
    assert not PolicySpec.parse("reboot").keeps_history
    assert PolicySpec.parse("reboot-generic").keeps_history
    assert PolicySpec.parse("giro").keeps_history
    assert PolicyState.empty(2, PolicySpec.parse("ts")).histories is None
