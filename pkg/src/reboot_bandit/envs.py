"""Reward laws with known means and the bandit instances built from them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence, Union

import numpy as np

from .errors import ConfigurationError

# Integer tags shared with the numba kernels.
GAUSSIAN, SHIFTED_EXPONENTIAL, LOGISTIC, BERNOULLI = range(4)


@dataclass(frozen=True)
class Gaussian:
    mu: float
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ConfigurationError(f"Gaussian sigma must be positive, got {self.sigma}")

    @property
    def mean(self) -> float:
        return self.mu

    @property
    def std(self) -> float:
        return self.sigma

    def sample(self, rng: np.random.Generator) -> float:
        return self.mu + self.sigma * rng.standard_normal()

    def kernel_params(self) -> tuple[int, float, float]:
        return GAUSSIAN, self.mu, self.sigma


@dataclass(frozen=True)
class ShiftedExponential:
    """``shift + Exp`` where the exponential part has mean ``mean_excess``."""

    mean_excess: float
    shift: float = 0.0

    def __post_init__(self):
        if not self.mean_excess > 0:
            raise ConfigurationError(f"mean_excess must be positive, got {self.mean_excess}")

    @property
    def mean(self) -> float:
        return self.shift + self.mean_excess

    @property
    def std(self) -> float:
        return self.mean_excess

    def sample(self, rng: np.random.Generator) -> float:
        return self.shift + self.mean_excess * rng.standard_exponential()

    def kernel_params(self) -> tuple[int, float, float]:
        return SHIFTED_EXPONENTIAL, self.mean_excess, self.shift


@dataclass(frozen=True)
class Logistic:
    mu: float
    variance: float = 1.0

    def __post_init__(self):
        if not self.variance > 0:
            raise ConfigurationError(f"Logistic variance must be positive, got {self.variance}")

    @property
    def scale(self) -> float:
        # variance = scale**2 * pi**2 / 3
        return math.sqrt(3.0 * self.variance) / math.pi

    @property
    def mean(self) -> float:
        return self.mu

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    def sample(self, rng: np.random.Generator) -> float:
        u = rng.random()
        while u <= 0.0:
            u = rng.random()
        return self.mu + self.scale * math.log(u / (1.0 - u))

    def kernel_params(self) -> tuple[int, float, float]:
        return LOGISTIC, self.mu, self.scale


@dataclass(frozen=True)
class Bernoulli:
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ConfigurationError(f"Bernoulli p must lie in [0, 1], got {self.p}")

    @property
    def mean(self) -> float:
        return self.p

    @property
    def std(self) -> float:
        return math.sqrt(self.p * (1.0 - self.p))

    def sample(self, rng: np.random.Generator) -> float:
        return 1.0 if rng.random() < self.p else 0.0

    def kernel_params(self) -> tuple[int, float, float]:
        return BERNOULLI, self.p, 0.0


RewardDistribution = Union[Gaussian, ShiftedExponential, Logistic, Bernoulli]

_KINDS = {
    "gaussian": Gaussian,
    "shifted_exponential": ShiftedExponential,
    "logistic": Logistic,
    "bernoulli": Bernoulli,
}


def sample_reward(dist: RewardDistribution, rng: np.random.Generator) -> float:
    return dist.sample(rng)


def mean_of(dist: RewardDistribution) -> float:
    return dist.mean


def distribution_from_dict(d: Mapping[str, Any]) -> RewardDistribution:
    d = dict(d)
    kind = d.pop("kind", None)
    if kind not in _KINDS:
        raise ConfigurationError(f"unknown reward distribution kind {kind!r}; expected one of {sorted(_KINDS)}")
    try:
        return _KINDS[kind](**d)
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for {kind}: {exc}") from None


def distribution_to_dict(dist: RewardDistribution) -> dict:
    name = next(k for k, v in _KINDS.items() if isinstance(dist, v))
    return {"kind": name, **dist.__dict__}


@dataclass(frozen=True)
class BanditInstance:
    arms: tuple
    means: np.ndarray = field(init=False, repr=False, compare=False)
    gaps: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        arms = tuple(self.arms)
        if len(arms) < 2:
            raise ConfigurationError("a bandit instance needs at least 2 arms")
        means = np.array([a.mean for a in arms], dtype=float)
        object.__setattr__(self, "arms", arms)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "gaps", means.max() - means)

    @property
    def n_arms(self) -> int:
        return len(self.arms)

    @property
    def mu_star(self) -> float:
        return float(self.means.max())

    def kernel_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        kinds, p1, p2 = zip(*(a.kernel_params() for a in self.arms))
        return (np.array(kinds, dtype=np.int64), np.array(p1, dtype=float), np.array(p2, dtype=float))


@dataclass(frozen=True)
class InstanceSpec:
    """A named preset plus its parameters, or an explicit list of arms.

    Presets:
      gaussian-unif        k Gaussian arms, means ~ Unif(low, high), common sigma
      exp-shifted          k arms ``shift + Exp(mean mu_k)``, mu_k ~ Unif(low, high)
      logistic-unif        k logistic arms, means ~ Unif(low, high), given variance
      two-arm-shift        Gaussian means (c+1, c), sigma 1
      two-arm-scale        Gaussian means (1, 0), common sigma
      explicit             ``arms`` is a list of distribution dicts
    """

    preset: str
    params: Mapping[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "InstanceSpec":
        d = dict(d)
        preset = d.pop("preset", "explicit" if "arms" in d else None)
        if preset is None:
            raise ConfigurationError("instance spec needs a 'preset' or an 'arms' list")
        return cls(preset, d)

    def to_dict(self) -> dict:
        return {"preset": self.preset, **self.params}


def _uniform_means(params, rng, low, high):
    k = int(params.get("k", 10))
    lo = float(params.get("low", low))
    hi = float(params.get("high", high))
    if k < 2 or not lo <= hi:
        raise ConfigurationError(f"bad preset parameters k={k}, low={lo}, high={hi}")
    return rng.uniform(lo, hi, size=k)


def make_instance(spec: InstanceSpec | str | Mapping, rng: np.random.Generator | None = None) -> BanditInstance:
    """Build a bandit instance, drawing random means from ``rng`` where the preset has them."""
    if isinstance(spec, str):
        spec = InstanceSpec(spec)
    elif not isinstance(spec, InstanceSpec):
        spec = InstanceSpec.from_dict(spec)
    p = dict(spec.params)
    name = spec.preset

    if name == "two-arm-shift":
        c = float(p.get("c", 0.0))
        return BanditInstance((Gaussian(c + 1.0, 1.0), Gaussian(c, 1.0)))
    if name == "two-arm-scale":
        sigma = float(p.get("sigma", 1.0))
        return BanditInstance((Gaussian(1.0, sigma), Gaussian(0.0, sigma)))
    if name == "explicit":
        arms = p.get("arms")
        if not isinstance(arms, Sequence) or isinstance(arms, str):
            raise ConfigurationError("explicit instance needs an 'arms' list")
        return BanditInstance(tuple(distribution_from_dict(a) for a in arms))

    if rng is None:
        raise ConfigurationError(f"preset {name!r} draws random means and needs an rng")
    if name == "gaussian-unif":
        sigma = float(p.get("sigma", 1.0))
        return BanditInstance(tuple(Gaussian(m, sigma) for m in _uniform_means(p, rng, 5.0, 7.0)))
    if name == "exp-shifted":
        shift = float(p.get("shift", 5.0))
        excess = _uniform_means(p, rng, 0.0, 2.0)
        return BanditInstance(tuple(ShiftedExponential(m, shift) for m in excess))
    if name == "logistic-unif":
        var = float(p.get("variance", 1.0))
        return BanditInstance(tuple(Logistic(m, var) for m in _uniform_means(p, rng, 5.0, 7.0)))
    raise ConfigurationError(f"unknown instance preset {name!r}")
