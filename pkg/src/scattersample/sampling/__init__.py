"""The seven sampling strategies, each a deterministic function of
(dataset, params, seed), plus a single dispatch entry point.

RS, BNS, DBS, MCBNS and OBDBS return exactly target_n points; MVZS and RSBS
return within params.rate_tolerance of target_n.
"""

from __future__ import annotations

from ..core import LabeledDataset, SampleIndexSet, StrategyId
from .bluenoise import (
    sample_blue_noise,
    sample_blue_noise_with_radius,
    sample_multiclass_blue_noise,
    sample_multiclass_blue_noise_with_radii,
)
from .params import (
    BlueNoiseParams,
    GridDensityParams,
    OutlierBiasParams,
    SamplingParams,
)
from .subdivision import sample_recursive_subdivision
from .weighted import (
    density_weights,
    outlier_blend_weights,
    sample_density_biased,
    sample_outlier_biased_density,
    sample_random,
)
from .zorder import (
    MultiViewCover,
    morton_key,
    morton_keys,
    sample_multiview_zorder,
    sample_multiview_zorder_with_details,
)

__all__ = [
    "SamplingParams",
    "BlueNoiseParams",
    "GridDensityParams",
    "OutlierBiasParams",
    "MultiViewCover",
    "sample",
    "sample_random",
    "sample_blue_noise",
    "sample_blue_noise_with_radius",
    "sample_density_biased",
    "sample_multiclass_blue_noise",
    "sample_multiclass_blue_noise_with_radii",
    "sample_outlier_biased_density",
    "sample_multiview_zorder",
    "sample_multiview_zorder_with_details",
    "sample_recursive_subdivision",
    "density_weights",
    "outlier_blend_weights",
    "morton_key",
    "morton_keys",
]


def sample(
    strategy: StrategyId,
    ds: LabeledDataset,
    params: SamplingParams,
    *,
    blue_noise: BlueNoiseParams | None = None,
    grid: GridDensityParams | None = None,
    outlier_bias: OutlierBiasParams | None = None,
) -> SampleIndexSet:
    """Run one strategy. Strategy-specific parameter bags fall back to their
    defaults; OBDBS computes LOF scores on the fly when none are supplied."""
    if strategy is StrategyId.RS:
        return sample_random(ds, params)
    if strategy is StrategyId.BNS:
        return sample_blue_noise(ds, params, blue_noise)
    if strategy is StrategyId.DBS:
        return sample_density_biased(ds, params, grid)
    if strategy is StrategyId.MCBNS:
        return sample_multiclass_blue_noise(ds, params, blue_noise)
    if strategy is StrategyId.OBDBS:
        if outlier_bias is None:
            from ..outliers import lof_scores

            outlier_bias = OutlierBiasParams(outlier_scores=lof_scores(ds.points).scores)
        return sample_outlier_biased_density(ds, params, grid, outlier_bias)
    if strategy is StrategyId.MVZS:
        return sample_multiview_zorder(ds, params)
    if strategy is StrategyId.RSBS:
        return sample_recursive_subdivision(ds, params)
    raise ValueError(f"unknown strategy: {strategy!r}")
