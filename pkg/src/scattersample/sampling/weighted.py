"""Random, density biased, and outlier biased density based sampling.

All three draw without replacement from an explicit per-point probability
vector; the density strategies only differ in how that vector is built.
"""

from __future__ import annotations

import numpy as np

from ..core import LabeledDataset, SampleIndexSet
from .params import GridDensityParams, OutlierBiasParams, SamplingParams

__all__ = [
    "sample_random",
    "sample_density_biased",
    "sample_outlier_biased_density",
    "density_weights",
    "outlier_blend_weights",
]


def _check_target(target_n: int, n: int):
    if target_n > n:
        raise ValueError(f"target_n={target_n} exceeds dataset size {n}")


def sample_random(ds: LabeledDataset, p: SamplingParams) -> SampleIndexSet:
    """Uniform sampling without replacement; every point equally likely."""
    _check_target(p.target_n, ds.n)
    rng = np.random.default_rng(p.seed)
    picks = rng.choice(ds.n, size=p.target_n, replace=False)
    return SampleIndexSet.from_any_order(picks, n=ds.n)


def bin_populations(ds: LabeledDataset, gp: GridDensityParams) -> np.ndarray:
    """Population of each point's grid bin (grid_g bins per axis)."""
    g = gp.grid_g
    bx = np.minimum((ds.points.xs * g).astype(np.int64), g - 1)
    by = np.minimum((ds.points.ys * g).astype(np.int64), g - 1)
    flat = bx * g + by
    counts = np.bincount(flat, minlength=g * g)
    return counts[flat]


def density_weights(ds: LabeledDataset, gp: GridDensityParams) -> np.ndarray:
    """Normalized density-bias weights: n_b ** (alpha - 1), summing to 1."""
    if ds.n == 0:
        raise ValueError("empty dataset")
    w = bin_populations(ds, gp).astype(np.float64) ** (gp.alpha - 1.0)
    return w / w.sum()


def outlier_blend_weights(
    ds: LabeledDataset, gp: GridDensityParams, ob: OutlierBiasParams
) -> np.ndarray:
    """Blend of normalized density weights and normalized outlier scores.

    w = (1 - lam) * density + lam * scores / sum(scores); both terms are
    normalized first so lam is scale-free. A zero score vector contributes
    nothing (the density term alone remains, unless lam == 1).
    """
    scores = ob.outlier_scores
    if scores.size != ds.n:
        raise ValueError(f"outlier_scores length {scores.size} != dataset size {ds.n}")
    dens = density_weights(ds, gp)
    z = scores.sum()
    if z == 0.0:
        if ob.lam == 1.0:
            raise ValueError("lam=1 with all-zero outlier scores leaves no weight")
        return dens.copy()
    return (1.0 - ob.lam) * dens + ob.lam * scores / z


def _weighted_without_replacement(
    n: int, target_n: int, weights: np.ndarray, seed: int
) -> np.ndarray:
    rng = np.random.default_rng(seed)
    try:
        return rng.choice(n, size=target_n, replace=False, p=weights)
    except ValueError as exc:
        raise ValueError(f"cannot draw {target_n} points: {exc}") from exc


def sample_density_biased(
    ds: LabeledDataset, p: SamplingParams, gp: GridDensityParams | None = None
) -> SampleIndexSet:
    """Density biased sampling: over-samples sparse bins, under-samples dense ones."""
    gp = gp or GridDensityParams()
    _check_target(p.target_n, ds.n)
    w = density_weights(ds, gp)
    picks = _weighted_without_replacement(ds.n, p.target_n, w, p.seed)
    return SampleIndexSet.from_any_order(picks, n=ds.n)


def sample_outlier_biased_density(
    ds: LabeledDataset,
    p: SamplingParams,
    gp: GridDensityParams | None = None,
    ob: OutlierBiasParams | None = None,
) -> SampleIndexSet:
    """Density biased sampling with extra acceptance probability for outliers."""
    gp = gp or GridDensityParams()
    if ob is None:
        raise ValueError("outlier biased sampling needs OutlierBiasParams with scores")
    _check_target(p.target_n, ds.n)
    w = outlier_blend_weights(ds, gp, ob)
    picks = _weighted_without_replacement(ds.n, p.target_n, w, p.seed)
    return SampleIndexSet.from_any_order(picks, n=ds.n)
