"""Ground-truth outlier scoring.

Two detectors define the set of "true" outliers:

* local outlier factor (LOF): label-free density-ratio anomaly score,
* class purity: fraction of a point's k nearest neighbors carrying a
  different label.

Both scorers are pure functions of the dataset; the ground truth is the
union of the points exceeding a threshold under either detector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .core import LabeledDataset, PointSet, SampleIndexSet

__all__ = [
    "OutlierScoreVector",
    "OutlierGroundTruth",
    "lof_scores",
    "class_purity_scores",
    "ground_truth_outliers",
]

# Guards duplicate-point neighborhoods where every distance collapses to 0.
_DISTANCE_FLOOR = 1e-12


@dataclass(frozen=True)
class OutlierScoreVector:
    """Per-point outlier scores.

    ``scores`` is the thresholdable vector in [0, 1]; ``raw`` preserves the
    detector's native scale (LOF ratios are ~1 in homogeneous regions).
    """

    scores: np.ndarray
    raw: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.scores, dtype=np.float64)
        r = np.asarray(self.raw, dtype=np.float64)
        if s.shape != r.shape or s.ndim != 1:
            raise ValueError("scores and raw must be 1-D with equal length")
        if s.size and (not np.all(np.isfinite(s)) or not np.all(np.isfinite(r))):
            raise ValueError("scores must be finite")
        s.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "scores", s)
        object.__setattr__(self, "raw", r)

    def __len__(self) -> int:
        return self.scores.size


@dataclass(frozen=True)
class OutlierGroundTruth:
    """Indices of true outliers with per-index detector provenance flags."""

    indices: SampleIndexSet
    from_lof: np.ndarray
    from_purity: np.ndarray

    def __post_init__(self):
        lof = np.asarray(self.from_lof, dtype=bool)
        pur = np.asarray(self.from_purity, dtype=bool)
        if lof.shape != (len(self.indices),) or pur.shape != (len(self.indices),):
            raise ValueError("flag arrays must align with indices")
        if len(self.indices) and not np.all(lof | pur):
            raise ValueError("every ground-truth index needs at least one source flag")
        lof.setflags(write=False)
        pur.setflags(write=False)
        object.__setattr__(self, "from_lof", lof)
        object.__setattr__(self, "from_purity", pur)

    def __len__(self) -> int:
        return len(self.indices)


def _knn(xy: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact k nearest neighbors excluding self: (distances, indices), each N x k."""
    tree = cKDTree(xy)
    dist, idx = tree.query(xy, k=k + 1)
    # Column 0 is the point itself (distance 0, barring exact duplicates where
    # any duplicate may come first; dropping one self/duplicate column is
    # correct either way).
    return dist[:, 1:], idx[:, 1:]


def lof_scores(ps: PointSet, k: int = 20) -> OutlierScoreVector:
    """Local outlier factor with k neighbors, min-max normalized to [0, 1].

    raw LOF(p) = mean over neighbors o of lrd(o) / lrd(p), where
    lrd(p) = 1 / mean reachability distance from p to its neighbors and
    reach-dist(p, o) = max(k-distance(o), d(p, o)).
    """
    n = ps.n
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must satisfy 1 <= k <= N-1 (k={k}, N={n})")
    dist, idx = _knn(ps.as_array(), k)
    k_dist = dist[:, -1]
    # reach_dist[i, j] = max(k_dist of neighbor j, d(i, j))
    reach = np.maximum(k_dist[idx], dist)
    lrd = 1.0 / np.maximum(reach.mean(axis=1), _DISTANCE_FLOOR)
    raw = lrd[idx].mean(axis=1) / lrd
    lo, hi = raw.min(), raw.max()
    norm = np.zeros_like(raw) if hi == lo else (raw - lo) / (hi - lo)
    return OutlierScoreVector(scores=norm, raw=raw)


def class_purity_scores(ds: LabeledDataset, k: int = 10) -> OutlierScoreVector:
    """Fraction of the k nearest neighbors whose label differs (already in [0, 1])."""
    n = ds.n
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must satisfy 1 <= k <= N-1 (k={k}, N={n})")
    _, idx = _knn(ds.points.as_array(), k)
    differs = ds.labels[idx] != ds.labels[:, None]
    frac = differs.mean(axis=1)
    return OutlierScoreVector(scores=frac, raw=frac)


def ground_truth_outliers(
    ds: LabeledDataset,
    k_lof: int = 20,
    k_pur: int = 10,
    lof_thresh: float = 0.5,
    purity_thresh: float = 0.8,
) -> OutlierGroundTruth:
    """Union of LOF and class-purity detections at the given thresholds.

    Thresholds apply to the normalized scores and must lie in [0, 1].
    """
    for name, t in (("lof_thresh", lof_thresh), ("purity_thresh", purity_thresh)):
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1]")
    lof = lof_scores(ds.points, k=k_lof)
    pur = class_purity_scores(ds, k=k_pur)
    lof_hit = lof.scores >= lof_thresh
    pur_hit = pur.scores >= purity_thresh
    hit = np.flatnonzero(lof_hit | pur_hit)
    return OutlierGroundTruth(
        indices=SampleIndexSet(hit),
        from_lof=lof_hit[hit],
        from_purity=pur_hit[hit],
    )
