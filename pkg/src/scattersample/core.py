"""Core domain types shared by every sampling strategy and metric.

All coordinates live in the unit square after min-max normalization, class
labels are dense integers ``0..K-1``, and every random operation takes an
explicit integer seed.  Types are immutable after construction and all
operations are pure functions, so everything here is safe to share across
threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PointSet",
    "LabeledDataset",
    "SampleIndexSet",
    "StrategyId",
    "StrategyCapabilities",
    "Rect",
    "Seed",
    "normalize_points",
    "class_ratios",
    "capabilities",
]

# 64-bit unsigned integer; equal seeds give byte-identical outputs.
Seed = int


def _as_float_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


@dataclass(frozen=True)
class PointSet:
    """2-D point coordinates, both axes inside [0, 1]."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = _as_float_array(self.xs, "xs")
        ys = _as_float_array(self.ys, "ys")
        if xs.shape != ys.shape:
            raise ValueError("xs and ys must have equal length")
        if xs.size and (xs.min() < 0.0 or xs.max() > 1.0 or ys.min() < 0.0 or ys.max() > 1.0):
            raise ValueError("coordinates must lie in [0, 1]; normalize first")
        xs.setflags(write=False)
        ys.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    def __len__(self) -> int:
        return self.xs.size

    @property
    def n(self) -> int:
        return self.xs.size

    def as_array(self) -> np.ndarray:
        """N x 2 coordinate matrix (copy)."""
        return np.column_stack([self.xs, self.ys])


@dataclass(frozen=True)
class LabeledDataset:
    """Point set plus dense integer class labels in ``0..K-1``.

    With the default (inferred) class count every id in [0, K) must occur.
    Passing n_classes explicitly marks a subset of a parent dataset, where
    absent classes are allowed but ids must still be below the parent's K.
    """

    points: PointSet
    labels: np.ndarray
    n_classes: int = field(default=0)

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1 or labels.size != self.points.n:
            raise ValueError("labels length must equal the number of points")
        k = self.n_classes
        inferred = k == 0
        if inferred:
            k = int(labels.max()) + 1 if labels.size else 0
        if labels.size:
            if labels.min() < 0 or labels.max() >= k:
                raise ValueError(f"labels must lie in [0, {k})")
            if inferred and np.unique(labels).size != k:
                raise ValueError("every class id in [0, K) must occur at least once")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "n_classes", k)

    def subset(self, indices: "SampleIndexSet") -> "LabeledDataset":
        """The sampled sub-dataset, keeping this dataset's class count."""
        return LabeledDataset(
            PointSet(self.points.xs[indices.indices], self.points.ys[indices.indices]),
            self.labels[indices.indices],
            n_classes=self.n_classes,
        )

    def __len__(self) -> int:
        return self.points.n

    @property
    def n(self) -> int:
        return self.points.n


@dataclass(frozen=True)
class SampleIndexSet:
    """Strictly increasing point indices selected by a sampling strategy."""

    indices: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        if idx.ndim != 1:
            raise ValueError("indices must be one-dimensional")
        if idx.size:
            if idx.min() < 0:
                raise ValueError("indices must be non-negative")
            if np.any(np.diff(idx) <= 0):
                raise ValueError("indices must be strictly increasing (no duplicates)")
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    @classmethod
    def from_any_order(cls, indices, n: int | None = None) -> "SampleIndexSet":
        """Sort, validate uniqueness, and optionally range-check against n."""
        idx = np.sort(np.asarray(indices, dtype=np.int64))
        if idx.size and np.any(np.diff(idx) == 0):
            raise ValueError("duplicate indices in sample")
        if n is not None and idx.size and (idx[0] < 0 or idx[-1] >= n):
            raise ValueError(f"index out of range [0, {n})")
        return cls(idx)

    def __len__(self) -> int:
        return self.indices.size

    def as_set(self) -> set[int]:
        return set(int(i) for i in self.indices)


class StrategyId(enum.Enum):
    """The seven evaluated sampling strategies."""

    RS = "rs"          # random sampling
    BNS = "bns"        # blue noise sampling
    DBS = "dbs"        # density biased sampling
    MCBNS = "mcbns"    # multi-class blue noise sampling
    OBDBS = "obdbs"    # outlier biased density based sampling
    MVZS = "mvzs"      # multi-view Z-order sampling
    RSBS = "rsbs"      # recursive subdivision based sampling

    @classmethod
    def from_string(cls, name: str) -> "StrategyId":
        try:
            return cls(name.lower())
        except ValueError:
            valid = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown strategy {name!r}; expected one of: {valid}") from None


@dataclass(frozen=True)
class StrategyCapabilities:
    """Characteristic flags of a sampling strategy.

    multi_class: preserves per-class properties, not just whole-set ones.
    non_uniform: per-point selection probabilities differ.
    spatial_separation: enforces minimum spacing between selected points.
    density: aims to preserve or rebalance density.
    outlier: biases selection toward outliers.
    """

    multi_class: bool
    non_uniform: bool
    spatial_separation: bool
    density: bool
    outlier: bool


_CAPABILITY_MATRIX = {
    #                              MC     NU     S      D      O
    StrategyId.RS: StrategyCapabilities(False, False, False, False, False),
    StrategyId.BNS: StrategyCapabilities(False, True, True, False, False),
    StrategyId.DBS: StrategyCapabilities(False, True, False, True, False),
    StrategyId.MCBNS: StrategyCapabilities(True, True, True, False, False),
    StrategyId.OBDBS: StrategyCapabilities(False, True, False, True, True),
    StrategyId.MVZS: StrategyCapabilities(True, True, False, True, False),
    StrategyId.RSBS: StrategyCapabilities(True, True, False, True, True),
}


def capabilities(strategy: StrategyId) -> StrategyCapabilities:
    """Capability flags for a strategy (fixed lookup, total over StrategyId)."""
    return _CAPABILITY_MATRIX[strategy]


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle inside the unit square (lower-left anchored)."""

    x0: float
    y0: float
    w: float
    h: float

    def __post_init__(self):
        if not (0.0 < self.w <= 1.0 and 0.0 < self.h <= 1.0):
            raise ValueError("rect sides must lie in (0, 1]")
        if not (0.0 <= self.x0 and 0.0 <= self.y0):
            raise ValueError("rect corner must be non-negative")
        if self.x0 + self.w > 1.0 + 1e-12 or self.y0 + self.h > 1.0 + 1e-12:
            raise ValueError("rect must fit inside the unit square")

    @property
    def area(self) -> float:
        return self.w * self.h

    def contains(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Boolean mask of points inside the half-open box [x0,x0+w) x [y0,y0+h)."""
        return (
            (xs >= self.x0)
            & (xs < self.x0 + self.w)
            & (ys >= self.y0)
            & (ys < self.y0 + self.h)
        )


def normalize_points(raw_xs, raw_ys) -> PointSet:
    """Min-max normalize each axis to [0, 1].

    A degenerate axis (max == min) maps all of its coordinates to 0.5.
    Raises on empty input or non-finite coordinates.
    """
    xs = _as_float_array(raw_xs, "xs")
    ys = _as_float_array(raw_ys, "ys")
    if xs.size == 0:
        raise ValueError("cannot normalize an empty point list")
    if xs.shape != ys.shape:
        raise ValueError("xs and ys must have equal length")

    def norm_axis(a: np.ndarray) -> np.ndarray:
        lo, hi = a.min(), a.max()
        if hi == lo:
            return np.full_like(a, 0.5)
        return (a - lo) / (hi - lo)

    return PointSet(norm_axis(xs), norm_axis(ys))


def class_ratios(ds: LabeledDataset) -> np.ndarray:
    """Per-class share of the dataset; entries are count(c)/N and sum to 1."""
    if ds.n == 0:
        raise ValueError("empty dataset has no class ratios")
    counts = np.bincount(ds.labels, minlength=ds.n_classes)
    return counts / float(ds.n)
