"""scattersample: sampling strategies, outlier oracles, quality metrics and
a benchmark harness for multi-class scatterplots."""

from .core import (
    LabeledDataset,
    PointSet,
    Rect,
    SampleIndexSet,
    Seed,
    StrategyCapabilities,
    StrategyId,
    capabilities,
    class_ratios,
    normalize_points,
)

__version__ = "0.1.0"

__all__ = [
    "LabeledDataset",
    "PointSet",
    "Rect",
    "SampleIndexSet",
    "Seed",
    "StrategyCapabilities",
    "StrategyId",
    "capabilities",
    "class_ratios",
    "normalize_points",
    "__version__",
]
