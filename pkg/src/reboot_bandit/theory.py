"""Regret-bound constants, proof thresholds and tail inequalities for Gaussian ReBoot.

Everything here is closed-form evaluation plus numeric spot checks of the
tail inequalities against scipy's normal and chi-square survival functions.
Bounds are only stated for unit-variance rewards; nothing is extrapolated.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

from scipy import stats

from .armstats import ArmStats, prss, rss
from .errors import TheoryDomainError

SQRT_2PI = math.sqrt(2.0 * math.pi)
SIGMA_A_MIN_C2 = 1.5
SIGMA_A_MIN_C1 = 1.0 / math.sqrt(2.0)

GAUSSIAN_GRID = (0.5, 1.0, 2.0, 2.5066, 3.0, 5.0)
CHISQ_GRID = tuple((n, f * n) for n in (1, 5, 10, 50) for f in (0.5, 1.0, 2.0, 5.0))


def c1(sigma_a: float) -> float:
    if not sigma_a > SIGMA_A_MIN_C1:
        raise TheoryDomainError(f"C1 requires sigma_a > 1/sqrt(2), got {sigma_a}")
    return 8.0 / (2.0 * sigma_a**2 - 1.0)


def c2(sigma_a: float) -> float:
    if not sigma_a > SIGMA_A_MIN_C2:
        raise TheoryDomainError(f"C2 requires sigma_a > 1.5, got {sigma_a}")
    return 128.0 * sigma_a**2 * (3.1 + 2.0 / math.sqrt(1.0 - 2.25 / sigma_a**2))


def m_of_r(r: float) -> float:
    """Uniform bound on the expected underestimation rounds of the optimal arm."""
    if not r > 1.5:
        raise TheoryDomainError(f"M(r) requires r > 1.5, got {r}")
    return 1.1 + 1.0 / math.sqrt(1.0 - (1.5 / r) ** 2)


def _check_log_args(T: float, gap: float, sigma: float) -> None:
    if not T >= 1:
        raise TheoryDomainError(f"horizon must be >= 1, got {T}")
    if not gap > 0:
        raise TheoryDomainError(f"gap must be > 0, got {gap}")
    if not sigma > 0:
        raise TheoryDomainError(f"sigma must be > 0, got {sigma}")


def thresholds(T: float, gap: float, sigma: float, sigma_a: float) -> dict[str, float]:
    """Sample sizes beyond which each piece of a_k (``s_a*``) and b_k (``s_b*``) is O(1/T)."""
    _check_log_args(T, gap, sigma)
    if T < 2:
        raise TheoryDomainError(f"thresholds require T >= 2, got {T}")
    r = sigma_a / sigma
    if not r > SIGMA_A_MIN_C1:
        raise TheoryDomainError(f"thresholds require r = sigma_a/sigma > 1/sqrt(2), got r={r}")
    log_t = math.log(T)
    snr = (sigma / gap) ** 2
    inv = 1.0 / (2.0 * r * r - 1.0)
    return {
        "s_a1": 256.0 * r * r * snr * log_t,
        "s_a2": 64.0 * snr * log_t,
        "s_a3": 16.0 * inv * log_t,
        "s_b1": 128.0 * r * r * snr * log_t,
        "s_b2": 32.0 * snr * log_t,
        "s_b3": 8.0 * inv * log_t,
    }


def decomposition_bounds(T: float, gap: float, sigma: float, sigma_a: float) -> tuple[float, float]:
    """Per-arm bounds ``(a_k, b_k)`` assembled from the per-piece sample-size thresholds.

    ``a_k <= 3 + 16 M(r) max{16 r^2 (sigma/gap)^2, 1/(2r^2-1)} log T`` and
    ``b_k <= 3 + 8 max{...} log T``; regret is at most ``sum gap_k (a_k + b_k)``.
    """
    th = thresholds(T, gap, sigma, sigma_a)
    r = sigma_a / sigma
    core = max(16.0 * (sigma / gap) ** 2 * r * r, 1.0 / (2.0 * r * r - 1.0)) * math.log(T)
    return 3.0 + 16.0 * m_of_r(r) * core, 3.0 + 8.0 * core


def regret_bound(T: float, gaps: Iterable[float], sigma_a: float) -> float:
    """Upper bound on T-round regret for unit-variance Gaussian arms.

    ``sum_k gap_k * (6 + (C1 + C2 / gap_k**2) * log T)``; zero gaps contribute 0.
    """
    if not T >= 1:
        raise TheoryDomainError(f"horizon must be >= 1, got {T}")
    a, b = c1(sigma_a), c2(sigma_a)
    log_t = math.log(T)
    total = 0.0
    for g in gaps:
        if g < 0:
            raise TheoryDomainError(f"gaps must be nonnegative, got {g}")
        if g == 0:
            continue
        total += g * (6.0 + (a + b / (g * g)) * log_t)
    return total


def good_event(stats: ArmStats, sigma_a: float) -> bool:
    """RSS dominated by the pseudo residual sum of squares."""
    return rss(stats) <= prss(stats.s, sigma_a)


def variance_enclosure(s: int, sigma: float, sigma_a: float) -> tuple[float, float]:
    """Two-sided range of the index variance on the good event: ``[2, 4] * r^2 sigma^2 / (s+2)``."""
    r = sigma_a / sigma
    base = r * r * sigma * sigma / (s + 2)
    return 2.0 * base, 4.0 * base


def gaussian_tail_lower(t: float) -> float:
    """Lower bound on ``P(Z >= t)`` for standard normal Z, t > 0."""
    if not t > 0:
        raise TheoryDomainError(f"Gaussian tail bound needs t > 0, got {t}")
    if t >= SQRT_2PI:
        return math.exp(-1.5 * t * t)
    return float(stats.norm.sf(SQRT_2PI))


def chisq_tail_bound(n: int, t: float) -> float:
    """Upper bound on ``P(chi2_n - n >= t)``."""
    if not n >= 1:
        raise TheoryDomainError(f"chi-square bound needs n >= 1, got {n}")
    if not t > 0:
        raise TheoryDomainError(f"chi-square bound needs t > 0, got {t}")
    return math.exp(-(t / 8.0) * min(1.0, t / n))


@dataclass
class CheckResult:
    inequality: str
    point: tuple
    bound: float
    true_value: Optional[float]
    holds: Optional[bool]
    note: str = ""


def _oracle(value: float) -> Optional[float]:
    v = float(value)
    return v if math.isfinite(v) and 0.0 <= v <= 1.0 else None


def check_dominance(
    gaussian_ts: Sequence[float] = GAUSSIAN_GRID,
    chisq_points: Sequence[tuple[int, float]] = CHISQ_GRID,
) -> list[CheckResult]:
    """Compare each tail bound to the exact tail at every grid point.

    Exact tails come from scipy's ``norm.sf`` / ``chi2.sf`` (series and
    continued-fraction evaluations of the incomplete gamma/erfc). A point whose
    oracle fails to produce a probability is reported with ``holds=None``.
    """
    out = []
    for t in gaussian_ts:
        bound = gaussian_tail_lower(t)
        true = _oracle(stats.norm.sf(t))
        holds = None if true is None else true >= bound
        out.append(CheckResult("gaussian_tail_lower", (t,), bound, true, holds, "" if true is not None else "oracle failed"))
    for n, t in chisq_points:
        bound = chisq_tail_bound(n, t)
        true = _oracle(stats.chi2.sf(n + t, n))
        holds = None if true is None else true <= bound
        out.append(CheckResult("chisq_tail_bound", (n, t), bound, true, holds, "" if true is not None else "oracle failed"))
    return out


@dataclass
class TheoryReport:
    sigma_a: float
    horizon: float
    gaps: list
    C1: float
    C2: float
    M_r: float
    thresholds: dict
    bound_value: float
    check_results: list = field(default_factory=list)

    @property
    def all_checks_hold(self) -> bool:
        return all(c.holds for c in self.check_results)

    def to_dict(self) -> dict:
        return asdict(self)

    def format(self) -> str:
        lines = [
            f"sigma_a = {self.sigma_a:g}, T = {self.horizon:g}, gaps = {', '.join(f'{g:g}' for g in self.gaps)}",
            f"C1(sigma_a) = {self.C1:.6g}",
            f"C2(sigma_a) = {self.C2:.6g}",
            f"M(r)        = {self.M_r:.6g}   (r = sigma_a, sigma = 1)",
            f"regret bound = {self.bound_value:.6g}",
        ]
        for gap, th in self.thresholds.items():
            lines.append(f"thresholds (gap={gap}): " + ", ".join(f"{k}={v:.4g}" for k, v in th.items()))
        for c in self.check_results:
            status = {True: "ok", False: "VIOLATED", None: "n/a"}[c.holds]
            true = "nan" if c.true_value is None else f"{c.true_value:.6g}"
            lines.append(f"  [{status}] {c.inequality}{c.point}: bound={c.bound:.6g} exact={true}")
        return "\n".join(lines)


def theory_report(sigma_a: float, T: float, gaps: Sequence[float]) -> TheoryReport:
    """Evaluate constants, thresholds (T >= 2 only), bound and tail checks with sigma = 1."""
    gaps = [float(g) for g in gaps]
    th = {}
    if T >= 2:
        th = {f"{g:g}": thresholds(T, g, 1.0, sigma_a) for g in gaps if g > 0}
    return TheoryReport(
        sigma_a=float(sigma_a),
        horizon=float(T),
        gaps=gaps,
        C1=c1(sigma_a),
        C2=c2(sigma_a),
        M_r=m_of_r(sigma_a),
        thresholds=th,
        bound_value=regret_bound(T, gaps, sigma_a),
        check_results=check_dominance(),
    )
