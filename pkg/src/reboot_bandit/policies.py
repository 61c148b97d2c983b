"""Arm-index rules for ReBoot and the baseline policies, plus arm selection.

Every index function takes the random stream explicitly and draws fresh
randomness on each call (one resample per arm per round).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping, Optional, Sequence

import numpy as np

from .armstats import ArmStats, History, index_variance, pseudo_residuals
from .armstats import mean as stats_mean
from .armstats import update as stats_update
from .errors import ConfigurationError, UndefinedStatisticError
from .weights import WeightDistribution, sample_weights


class PolicyKind(str, Enum):
    REBOOT_GAUSSIAN = "reboot"
    REBOOT_GENERIC = "reboot-generic"
    VANILLA_RB = "vanilla-rb"
    FTL = "ftl"
    GAUSSIAN_TS = "ts"
    GIRO = "giro"
    PHE = "phe"

    @property
    def code(self) -> int:
        return list(PolicyKind).index(self)


_REBOOT_KINDS = (PolicyKind.REBOOT_GAUSSIAN, PolicyKind.REBOOT_GENERIC)
_HISTORY_KINDS = (PolicyKind.REBOOT_GENERIC, PolicyKind.VANILLA_RB, PolicyKind.GIRO)

DEFAULT_SIGMA_A = 1.5
DEFAULT_A = {PolicyKind.GIRO: 1.0, PolicyKind.PHE: 2.1}
PHE_NORMALIZATIONS = ("augmented", "scaled")


@dataclass(frozen=True)
class PolicySpec:
    kind: PolicyKind
    sigma_a: Optional[float] = None
    weight_dist: WeightDistribution = WeightDistribution.GAUSSIAN
    a: Optional[float] = None
    phe_normalization: str = "augmented"
    label: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        try:
            kind = PolicyKind(self.kind)
            wd = WeightDistribution(self.weight_dist)
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from None
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "weight_dist", wd)
        if kind in _REBOOT_KINDS and not (self.sigma_a is not None and self.sigma_a > 0):
            raise ConfigurationError(f"{kind.value} needs sigma_a > 0, got {self.sigma_a!r}")
        if kind in (PolicyKind.GIRO, PolicyKind.PHE):
            if not (self.a is not None and self.a > 0):
                raise ConfigurationError(f"{kind.value} needs a > 0, got {self.a!r}")
            if kind is PolicyKind.GIRO and float(self.a) != int(self.a):
                raise ConfigurationError(f"giro needs an integer pseudo-reward rate a, got {self.a!r}")
        if self.phe_normalization not in PHE_NORMALIZATIONS:
            raise ConfigurationError(f"phe_normalization must be one of {PHE_NORMALIZATIONS}")

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        k = self.kind
        if k in _REBOOT_KINDS:
            tag = f"{k.value}-{self.sigma_a:g}"
            return tag if k is PolicyKind.REBOOT_GAUSSIAN else f"{tag}-{self.weight_dist.value}"
        if k is PolicyKind.VANILLA_RB:
            return f"{k.value}-{self.weight_dist.value}" if self.weight_dist is not WeightDistribution.GAUSSIAN else k.value
        if k is PolicyKind.PHE and self.phe_normalization == "scaled":
            return f"{k.value}-{self.a:g}-scaled"
        if k in (PolicyKind.GIRO, PolicyKind.PHE):
            return f"{k.value}-{self.a:g}"
        return k.value

    @property
    def keeps_history(self) -> bool:
        return self.kind in _HISTORY_KINDS

    @classmethod
    def parse(cls, text: str) -> "PolicySpec":
        """Parse ``kind[:param[:option]]``.

        Examples: ``reboot:1.7``, ``reboot-generic:1.5:rademacher``,
        ``vanilla-rb:rademacher``, ``giro:1``, ``phe:2.1:scaled``.
        """
        parts = text.strip().lower().split(":")
        try:
            kind = PolicyKind(parts[0])
        except ValueError:
            raise ConfigurationError(
                f"unknown policy {parts[0]!r}; expected one of {[k.value for k in PolicyKind]}"
            ) from None
        rest = parts[1:]
        try:
            if kind in _REBOOT_KINDS:
                sigma_a = float(rest[0]) if rest else DEFAULT_SIGMA_A
                wd = rest[1] if len(rest) > 1 else WeightDistribution.GAUSSIAN
                return cls(kind, sigma_a=sigma_a, weight_dist=wd)
            if kind is PolicyKind.VANILLA_RB:
                return cls(kind, weight_dist=rest[0] if rest else WeightDistribution.GAUSSIAN)
            if kind is PolicyKind.PHE:
                a = float(rest[0]) if rest else DEFAULT_A[kind]
                return cls(kind, a=a, phe_normalization=rest[1] if len(rest) > 1 else "augmented")
            if kind is PolicyKind.GIRO:
                return cls(kind, a=float(rest[0]) if rest else DEFAULT_A[kind])
        except ValueError as exc:
            raise ConfigurationError(f"cannot parse policy {text!r}: {exc}") from None
        if rest:
            raise ConfigurationError(f"policy {kind.value} takes no parameters")
        return cls(kind)

    @classmethod
    def from_dict(cls, d: Mapping[str, Any] | str) -> "PolicySpec":
        if isinstance(d, str):
            return cls.parse(d)
        d = dict(d)
        try:
            kind = PolicyKind(d.get("kind"))
        except ValueError:
            raise ConfigurationError(f"unknown policy kind {d.get('kind')!r}") from None
        if kind in DEFAULT_A:
            d.setdefault("a", DEFAULT_A[kind])
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigurationError(f"bad policy spec {d}: {exc}") from None

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value}
        if self.sigma_a is not None:
            d["sigma_a"] = self.sigma_a
        if self.kind in (PolicyKind.REBOOT_GENERIC, PolicyKind.VANILLA_RB):
            d["weight_dist"] = self.weight_dist.value
        if self.a is not None:
            d["a"] = self.a
        if self.kind is PolicyKind.PHE:
            d["phe_normalization"] = self.phe_normalization
        if self.label:
            d["label"] = self.label
        return d


@dataclass
class PolicyState:
    """Per-arm statistics (and raw histories where the policy resamples them)."""

    stats: list
    histories: Optional[list] = None

    @classmethod
    def empty(cls, n_arms: int, spec: PolicySpec) -> "PolicyState":
        if n_arms < 1:
            raise ConfigurationError("need at least one arm")
        hist = [[] for _ in range(n_arms)] if spec.keeps_history else None
        return cls([ArmStats() for _ in range(n_arms)], hist)

    @property
    def n_arms(self) -> int:
        return len(self.stats)

    @property
    def total_pulls(self) -> int:
        return sum(st.s for st in self.stats)

    def observe(self, arm: int, reward: float) -> None:
        self.stats[arm] = stats_update(self.stats[arm], reward)
        if self.histories is not None:
            self.histories[arm].append(float(reward))


def _require_history(history: History) -> np.ndarray:
    y = np.asarray(history, dtype=float)
    if y.size == 0:
        raise UndefinedStatisticError("arm index needs a nonempty history")
    return y


def _require_pulled(stats: ArmStats) -> None:
    if stats.s == 0:
        raise UndefinedStatisticError("arm index needs at least one pull")


def reboot_index_gaussian(stats: ArmStats, sigma_a: float, rng: np.random.Generator, size=None):
    """O(1) ReBoot index under Gaussian weights.

    With Gaussian weights the index is exactly normal given the history, with
    mean ``Ybar`` and variance ``(RSS + PRSS) / (s+2)**2``. ``size`` gives that
    many independent draws, as with numpy's samplers.
    """
    _require_pulled(stats)
    return stats_mean(stats) + math.sqrt(index_variance(stats, sigma_a)) * rng.standard_normal(size)


def reboot_index_generic(
    history: History,
    sigma_a: float,
    dist: WeightDistribution,
    rng: np.random.Generator,
    weights: Optional[np.ndarray] = None,
    size: Optional[int] = None,
):
    """ReBoot index by explicit residual resampling.

    ``weights`` overrides the random draw (shape ``(..., s+2)``); used to pin
    the perturbation in tests.
    """
    y = _require_history(history)
    s = y.size
    ybar = y.sum() / s
    e_plus, e_minus = pseudo_residuals(s, sigma_a)
    e = np.concatenate([y - ybar, [e_plus, e_minus]])
    return _perturbed_mean(ybar, e, dist, rng, weights, size)


def vanilla_rb_index(
    history: History,
    dist: WeightDistribution,
    rng: np.random.Generator,
    weights: Optional[np.ndarray] = None,
    size: Optional[int] = None,
):
    """Residual-bootstrap perturbed mean with no pseudo residuals."""
    y = _require_history(history)
    ybar = y.sum() / y.size
    return _perturbed_mean(ybar, y - ybar, dist, rng, weights, size)


def _perturbed_mean(ybar, residuals, dist, rng, weights, size):
    m = residuals.size
    if weights is None:
        w = sample_weights(dist, m * (1 if size is None else size), rng)
        w = w if size is None else w.reshape(size, m)
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape[-1:] != (m,):
            raise ValueError(f"expected weights with last dimension {m}, got shape {w.shape}")
    out = ybar + (w @ residuals) / m
    return float(out) if np.ndim(out) == 0 else out


def ftl_index(stats: ArmStats) -> float:
    _require_pulled(stats)
    return stats_mean(stats)


def ts_gaussian_index(stats: ArmStats, rng: np.random.Generator, size=None):
    """Posterior draw under a N(0, 1) prior and unit-variance Gaussian likelihood."""
    n = stats.s + 1
    return stats.sum / n + rng.standard_normal(size) / math.sqrt(n)


def giro_pseudo_count(a: float, s: int) -> int:
    """Number of 0-valued (and of 1-valued) pseudo rewards for ``s`` observations."""
    return int(round(a)) * s


def giro_index(history: History, a: float, rng: np.random.Generator, size=None):
    """Mean of a with-replacement bootstrap resample of the history augmented
    with ``a*s`` zeros and ``a*s`` ones."""
    y = _require_history(history)
    if not a > 0 or float(a) != int(a):
        raise ConfigurationError(f"giro needs a positive integer a, got {a!r}")
    m = giro_pseudo_count(a, y.size)
    augmented = np.concatenate([y, np.zeros(m), np.ones(m)])
    n = augmented.size
    if size is None:
        return float(augmented[rng.integers(0, n, size=n)].mean())
    return augmented[rng.integers(0, n, size=(size, n))].mean(axis=1)


def phe_pseudo_count(a: float, s: int) -> int:
    """``ceil(a*s)``, ignoring representation error in the product (2.1*10 is 21, not 22)."""
    return math.ceil(a * s - 1e-9)


def phe_index(
    stats: ArmStats, a: float, rng: np.random.Generator, normalization: str = "augmented", size=None
):
    """Mean of the history perturbed by ``n = ceil(a s)`` Bernoulli(1/2) pseudo rewards.

    ``U ~ Binomial(n, 1/2)`` is the pseudo-reward total. ``"augmented"`` divides
    by the perturbed history's size ``s + n``; ``"scaled"`` divides by
    ``(a+1) s``. The scaled form is shift-invariant across arms, the augmented
    one is not (rarely pulled arms are pulled toward 1/2).
    """
    _require_pulled(stats)
    if not a > 0:
        raise ConfigurationError(f"phe needs a > 0, got {a!r}")
    s = stats.s
    n = phe_pseudo_count(a, s)
    u = rng.binomial(n, 0.5, size)
    if normalization == "scaled":
        return (stats.sum + u) / ((a + 1.0) * s)
    if normalization == "augmented":
        return (stats.sum + u) / (s + n)
    raise ConfigurationError(f"unknown phe normalization {normalization!r}")


def arm_index(state: PolicyState, arm: int, spec: PolicySpec, rng: np.random.Generator) -> float:
    k = spec.kind
    st = state.stats[arm]
    if k is PolicyKind.REBOOT_GAUSSIAN:
        return reboot_index_gaussian(st, spec.sigma_a, rng)
    if k is PolicyKind.FTL:
        return ftl_index(st)
    if k is PolicyKind.GAUSSIAN_TS:
        return ts_gaussian_index(st, rng)
    if k is PolicyKind.PHE:
        return phe_index(st, spec.a, rng, spec.phe_normalization)
    hist = state.histories[arm]
    if k is PolicyKind.REBOOT_GENERIC:
        return reboot_index_generic(hist, spec.sigma_a, spec.weight_dist, rng)
    if k is PolicyKind.VANILLA_RB:
        return vanilla_rb_index(hist, spec.weight_dist, rng)
    if k is PolicyKind.GIRO:
        return giro_index(hist, spec.a, rng)
    raise ConfigurationError(f"unhandled policy kind {k}")


def argmax_random_tiebreak(values: Sequence[float], rng: np.random.Generator) -> int:
    values = np.asarray(values, dtype=float)
    best = np.flatnonzero(values == values.max())
    if best.size == 1:
        return int(best[0])
    # same draw as the jitted kernels use, so both engines replay identically
    return int(best[int(rng.random() * best.size)])


def select_arm(state: PolicyState, spec: PolicySpec, rng: np.random.Generator) -> int:
    """Follow the (perturbed) leader: fresh index for every arm, then argmax."""
    indices = [arm_index(state, k, spec, rng) for k in range(state.n_arms)]
    return argmax_random_tiebreak(indices, rng)
