"""Parameter bags for the sampling strategies."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import Seed

__all__ = [
    "SamplingParams",
    "BlueNoiseParams",
    "GridDensityParams",
    "OutlierBiasParams",
]


@dataclass(frozen=True)
class SamplingParams:
    """Common knobs: requested size, seed, and the size tolerance that the
    set-cover and subdivision strategies are held to."""

    target_n: int
    seed: Seed = 0
    rate_tolerance: float = 0.01

    def __post_init__(self):
        if self.target_n < 0:
            raise ValueError("target_n must be non-negative")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.rate_tolerance < 0:
            raise ValueError("rate_tolerance must be non-negative")


@dataclass(frozen=True)
class BlueNoiseParams:
    """Disk-radius search bounds in unit-square units."""

    r_lo: float = 1e-4
    r_hi: float = 1.5
    max_radius_iters: int = 30

    def __post_init__(self):
        if not 0 < self.r_lo < self.r_hi:
            raise ValueError("radius bounds must satisfy 0 < r_lo < r_hi")
        if self.max_radius_iters < 1:
            raise ValueError("max_radius_iters must be positive")


@dataclass(frozen=True)
class GridDensityParams:
    """Bin grid and bias exponent for density biased sampling.

    Per-point weight is n_b ** (alpha - 1), n_b the population of the
    point's bin: alpha < 1 over-samples sparse bins, alpha = 1 is uniform.
    """

    grid_g: int = 32
    alpha: float = 0.5

    def __post_init__(self):
        if self.grid_g < 1:
            raise ValueError("grid_g must be at least 1")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")


@dataclass(frozen=True)
class OutlierBiasParams:
    """Blend factor and per-point outlier scores for outlier biased sampling."""

    outlier_scores: np.ndarray = field(default_factory=lambda: np.zeros(0))
    lam: float = 0.5

    def __post_init__(self):
        scores = np.asarray(self.outlier_scores, dtype=np.float64)
        if scores.ndim != 1:
            raise ValueError("outlier_scores must be 1-D")
        if scores.size and (not np.all(np.isfinite(scores)) or scores.min() < 0 or scores.max() > 1):
            raise ValueError("outlier_scores must lie in [0, 1]")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lam must lie in [0, 1]")
        scores.setflags(write=False)
        object.__setattr__(self, "outlier_scores", scores)
