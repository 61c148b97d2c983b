"""Bootstrap weight laws with zero mean and unit variance."""
from __future__ import annotations

from enum import Enum

import numpy as np


class WeightDistribution(str, Enum):
    GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"

    @property
    def code(self) -> int:
        # integer tag used by the jitted simulation kernels
        return 0 if self is WeightDistribution.GAUSSIAN else 1


def sample_weights(dist: WeightDistribution, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` i.i.d. bootstrap weights from ``dist``.

    Rademacher weights are built from uniform doubles (``u < 0.5 -> -1``) so
    the same stream can be replayed draw-for-draw inside the numba kernels.
    """
    if n < 1:
        raise ValueError(f"need at least one weight, got n={n}")
    dist = WeightDistribution(dist)
    if dist is WeightDistribution.GAUSSIAN:
        return rng.standard_normal(n)
    return np.where(rng.random(n) < 0.5, -1.0, 1.0)
