"""Jitted episode loop.

The draw order per round matches the pure-Python reference in ``sim``:
one index per arm in arm order, an optional tie-break draw, then the reward.
Policy/weight/reward codes are the ``.code`` tags of the corresponding enums.
"""
import math

import numba as nb
import numpy as np

from .armstats import rss_from_running, running_rss_step

_rss = nb.njit(cache=True)(rss_from_running)
_rss_step = nb.njit(cache=True)(running_rss_step)

REBOOT_GAUSSIAN, REBOOT_GENERIC, VANILLA_RB, FTL, GAUSSIAN_TS, GIRO, PHE = range(7)
W_GAUSSIAN, W_RADEMACHER = 0, 1


@nb.njit(cache=True)
def _weight(rng, wcode):
    if wcode == W_GAUSSIAN:
        return rng.standard_normal()
    return -1.0 if rng.random() < 0.5 else 1.0


@nb.njit(cache=True)
def _reward(rng, kind, p1, p2):
    if kind == 0:  # Gaussian(mu=p1, sigma=p2)
        return p1 + p2 * rng.standard_normal()
    if kind == 1:  # shift p2 + Exp(mean p1)
        return p2 + p1 * rng.standard_exponential()
    if kind == 2:  # Logistic(mu=p1, scale=p2)
        u = rng.random()
        while u <= 0.0:
            u = rng.random()
        return p1 + p2 * math.log(u / (1.0 - u))
    return 1.0 if rng.random() < p1 else 0.0


@nb.njit(cache=True, nogil=True)
def run_episode_kernel(kind, sigma_a, a, wcode, phe_scaled, arm_kind, p1, p2, gaps, horizon, rng):
    K = gaps.shape[0]
    counts = np.zeros(K, dtype=np.int64)
    sums = np.zeros(K)
    sumsq = np.zeros(K)
    m2 = np.zeros(K)
    keep = kind == REBOOT_GENERIC or kind == GIRO or (kind == VANILLA_RB and wcode != W_GAUSSIAN)
    hist = np.empty((K, horizon if keep else 1))
    idx = np.empty(K)
    regret = np.empty(horizon)
    m_giro = int(round(a))

    for t in range(horizon):
        if t < K:
            arm = t
        else:
            for k in range(K):
                s = counts[k]
                m = sums[k] / s
                if kind == REBOOT_GAUSSIAN:
                    var = (_rss(s, m2[k], sumsq[k]) + 2.0 * (s + 2) * sigma_a * sigma_a) / ((s + 2) * (s + 2))
                    idx[k] = m + math.sqrt(var) * rng.standard_normal()
                elif kind == FTL:
                    idx[k] = m
                elif kind == GAUSSIAN_TS:
                    idx[k] = sums[k] / (s + 1) + rng.standard_normal() / math.sqrt(s + 1)
                elif kind == PHE:
                    n = math.ceil(a * s - 1e-9)
                    u = rng.binomial(n, 0.5)
                    if phe_scaled:
                        idx[k] = (sums[k] + u) / ((a + 1.0) * s)
                    else:
                        idx[k] = (sums[k] + u) / (s + n)
                elif kind == VANILLA_RB and wcode == W_GAUSSIAN:
                    # exact conditional law N(Ybar, RSS / s^2)
                    idx[k] = m + math.sqrt(_rss(s, m2[k], sumsq[k])) / s * rng.standard_normal()
                elif kind == VANILLA_RB:
                    acc = 0.0
                    for i in range(s):
                        acc += _weight(rng, wcode) * (hist[k, i] - m)
                    idx[k] = m + acc / s
                elif kind == REBOOT_GENERIC:
                    acc = 0.0
                    for i in range(s):
                        acc += _weight(rng, wcode) * (hist[k, i] - m)
                    e = math.sqrt(s + 2) * sigma_a
                    acc += _weight(rng, wcode) * e
                    acc += _weight(rng, wcode) * (-e)
                    idx[k] = m + acc / (s + 2)
                else:  # GIRO: resample n = s + 2*a*s items from history + a*s zeros + a*s ones
                    n = s + 2 * m_giro * s
                    n_obs = rng.binomial(n, s / n)
                    n_one = rng.binomial(n - n_obs, 0.5)
                    acc = 0.0
                    for _ in range(n_obs):
                        acc += hist[k, int(rng.random() * s)]
                    idx[k] = (acc + n_one) / n

            best = idx[0]
            for k in range(1, K):
                if idx[k] > best:
                    best = idx[k]
            n_best = 0
            for k in range(K):
                if idx[k] == best:
                    n_best += 1
            pick = 0
            if n_best > 1:
                pick = int(rng.random() * n_best)
            arm = -1
            for k in range(K):
                if idx[k] == best:
                    if pick == 0:
                        arm = k
                        break
                    pick -= 1

        r = _reward(rng, arm_kind[arm], p1[arm], p2[arm])
        if keep:
            hist[arm, counts[arm]] = r
        m2[arm] = _rss_step(counts[arm], sums[arm], m2[arm], r)
        counts[arm] += 1
        sums[arm] += r
        sumsq[arm] += r * r
        reg = 0.0
        for k in range(K):
            reg += gaps[k] * counts[k]
        regret[t] = reg
    return regret, counts
