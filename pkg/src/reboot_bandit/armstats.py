"""Per-arm sufficient statistics, residual sums of squares and pseudo residuals.

Only ``(s, sum, sum_sq)`` plus a running RSS is stored, so the Gaussian-weight
index costs O(1) memory per arm. The running RSS is a Welford-style update; it
keeps full relative accuracy when the mean is large next to the spread, where
``sum_sq - s*mean**2`` cancels. Raw reward histories are kept separately (a plain sequence of
floats) for the policies that need to resample individual residuals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigurationError, UndefinedStatisticError

History = Sequence[float]

_EPS = np.finfo(float).eps


def rss_from_moments(s: int, total: float, total_sq: float) -> float:
    """``max(0, sum_sq - s*mean**2)`` with sub-resolution values snapped to 0.

    The one-pass form loses about ``s*eps*sum_sq`` to rounding; anything below
    that floor is indistinguishable from a constant stream.
    """
    m = total / s
    rss = total_sq - s * m * m
    if rss <= 4.0 * (s + 1) * _EPS * total_sq:
        return 0.0
    return rss


def running_rss_step(s: int, total: float, m2: float, reward: float) -> float:
    """RSS after appending ``reward`` to ``s`` rewards that sum to ``total`` and have RSS ``m2``."""
    if s == 0:
        return 0.0
    return m2 + (reward - total / s) * (reward - (total + reward) / (s + 1))


def rss_from_running(s: int, m2: float, total_sq: float) -> float:
    # a constant stream leaves only (s*eps)^2-sized rounding residue
    if m2 <= 16.0 * (s + 1) * (s + 1) * _EPS * _EPS * total_sq:
        return 0.0
    return m2


@dataclass(frozen=True)
class ArmStats:
    s: int = 0
    sum: float = 0.0
    sum_sq: float = 0.0
    # running RSS; None means "derive it from sum and sum_sq"
    m2: Optional[float] = None

    def __post_init__(self):
        if self.s < 0:
            raise ValueError("pull count must be nonnegative")
        if self.s == 0 and (self.sum != 0.0 or self.sum_sq != 0.0):
            raise ValueError("an unpulled arm must have zero sums")

    @classmethod
    def from_rewards(cls, rewards: History) -> "ArmStats":
        stats = cls()
        for y in rewards:
            stats = update(stats, y)
        return stats

    def update(self, reward: float) -> "ArmStats":
        return update(self, reward)

    @property
    def mean(self) -> float:
        return mean(self)

    @property
    def rss(self) -> float:
        return rss(self)


def update(stats: ArmStats, reward: float) -> ArmStats:
    """Return the statistics after observing one more reward."""
    reward = float(reward)
    if not math.isfinite(reward):
        raise ValueError(f"reward must be finite, got {reward!r}")
    m2 = stats.m2
    if m2 is None:
        m2 = rss_from_moments(stats.s, stats.sum, stats.sum_sq) if stats.s else 0.0
    m2 = running_rss_step(stats.s, stats.sum, m2, reward)
    return ArmStats(stats.s + 1, stats.sum + reward, stats.sum_sq + reward * reward, m2)


def mean(stats: ArmStats) -> float:
    if stats.s == 0:
        raise UndefinedStatisticError("mean of an arm with no pulls")
    return stats.sum / stats.s


def rss(stats: ArmStats) -> float:
    """Residual sum of squares of the observed rewards."""
    if stats.s == 0:
        raise UndefinedStatisticError("RSS of an arm with no pulls")
    if stats.m2 is None:
        return rss_from_moments(stats.s, stats.sum, stats.sum_sq)
    return rss_from_running(stats.s, stats.m2, stats.sum_sq)


def _check_pseudo_args(s: int, sigma_a: float) -> None:
    if not sigma_a > 0:
        raise ConfigurationError(f"sigma_a must be positive, got {sigma_a!r}")
    if s < 1:
        raise UndefinedStatisticError(f"pseudo residuals need s >= 1, got s={s}")


def pseudo_residuals(s: int, sigma_a: float) -> tuple[float, float]:
    """The pair ``(+sqrt(s+2)*sigma_a, -sqrt(s+2)*sigma_a)`` appended to the residuals."""
    _check_pseudo_args(s, sigma_a)
    e = math.sqrt(s + 2) * sigma_a
    return e, -e


def prss(s: int, sigma_a: float) -> float:
    """Pseudo residual sum of squares, ``2*(s+2)*sigma_a**2``."""
    _check_pseudo_args(s, sigma_a)
    return 2.0 * (s + 2) * sigma_a * sigma_a


def index_variance(stats: ArmStats, sigma_a: float) -> float:
    """Conditional variance of the ReBoot index given the arm's history."""
    s = stats.s
    return (rss(stats) + prss(s, sigma_a)) / ((s + 2) * (s + 2))


def two_pass_rss(rewards: History) -> float:
    """Reference RSS: center first, then sum squares."""
    y = np.asarray(rewards, dtype=float)
    if y.size == 0:
        raise UndefinedStatisticError("RSS of an empty history")
    e = y - y.mean()
    return float(np.dot(e, e))
