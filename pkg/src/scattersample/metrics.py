"""Objective quality measures: outlier precision/recall, density orderings,
kernel-density discrepancy, and rank scoring.

Question truths are always computed on the full dataset; a strategy is then
judged by whether the ordering visible in its sample matches that truth.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import LabeledDataset, PointSet, Rect, SampleIndexSet
from .outliers import OutlierGroundTruth

__all__ = [
    "Ordering",
    "PrecisionRecall",
    "DensityQuestion",
    "NormalizedRecall",
    "precision_recall",
    "normalized_recall",
    "outlier_preservation_ratio",
    "region_density_order",
    "class_density_order",
    "kde_error",
    "ranking_scores",
    "answer_question",
    "question_accuracy",
]


class Ordering(enum.Enum):
    """Which side of a density comparison is denser."""

    A = "a"
    B = "b"
    TIE = "tie"


@dataclass(frozen=True)
class PrecisionRecall:
    """Set-overlap quality of marked outliers M against ground truth N.

    precision is None (undefined) when M is empty; recall_degenerate flags
    the |N| = 0 convention where recall is reported as 0.
    """

    precision: float | None
    recall: float
    m_size: int
    n_size: int
    overlap: int
    recall_degenerate: bool = False


class NormalizedRecall(NamedTuple):
    values: np.ndarray
    degenerate: bool


def precision_recall(marked: SampleIndexSet, truth: OutlierGroundTruth) -> PrecisionRecall:
    """precision = |N ∩ M| / |M|, recall = |N ∩ M| / |N|."""
    m = marked.as_set()
    n = truth.indices.as_set()
    overlap = len(m & n)
    precision = overlap / len(m) if m else None
    recall = overlap / len(n) if n else 0.0
    return PrecisionRecall(
        precision=precision,
        recall=recall,
        m_size=len(m),
        n_size=len(n),
        overlap=overlap,
        recall_degenerate=not n,
    )


def normalized_recall(recalls) -> NormalizedRecall:
    """Divide every recall by the maximum across strategies.

    All-zero input returns zeros with the degenerate flag set.
    """
    r = np.asarray(recalls, dtype=np.float64)
    if r.size == 0:
        raise ValueError("recall list must be non-empty")
    if np.any(r < 0):
        raise ValueError("recalls must be non-negative")
    top = r.max()
    if top == 0.0:
        return NormalizedRecall(np.zeros_like(r), True)
    return NormalizedRecall(r / top, False)


def outlier_preservation_ratio(sample: SampleIndexSet, truth: OutlierGroundTruth) -> float:
    """Fraction of true outliers that survive sampling."""
    n = truth.indices.as_set()
    if not n:
        raise ValueError("ground truth is empty")
    return len(n & sample.as_set()) / len(n)


def region_density_order(ps: PointSet, a: Rect, b: Rect) -> Ordering:
    """Compare point densities (count / area) of two rectangles."""
    da = int(a.contains(ps.xs, ps.ys).sum()) / a.area
    db = int(b.contains(ps.xs, ps.ys).sum()) / b.area
    if da > db:
        return Ordering.A
    if db > da:
        return Ordering.B
    return Ordering.TIE


def class_density_order(ds: LabeledDataset, r: Rect, c1: int, c2: int) -> Ordering:
    """Compare densities of two classes within one rectangle (same area, so
    in-rect counts decide)."""
    if c1 == c2:
        raise ValueError("classes to compare must differ")
    for c in (c1, c2):
        if not 0 <= c < ds.n_classes:
            raise ValueError(f"class {c} out of range [0, {ds.n_classes})")
    inside = r.contains(ds.points.xs, ds.points.ys)
    n1 = int((inside & (ds.labels == c1)).sum())
    n2 = int((inside & (ds.labels == c2)).sum())
    if n1 > n2:
        return Ordering.A
    if n2 > n1:
        return Ordering.B
    return Ordering.TIE


@dataclass(frozen=True)
class DensityQuestion:
    """A density-comparison question with its full-dataset truth.

    kind "region": which of rect_a / rect_b is denser (labels ignored)?
    kind "class": which of class_a / class_b is denser inside rect_a?
    """

    kind: str
    rect_a: Rect
    rect_b: Rect | None = None
    class_a: int | None = None
    class_b: int | None = None
    truth: Ordering = Ordering.TIE

    def __post_init__(self):
        if self.kind not in ("region", "class"):
            raise ValueError("kind must be 'region' or 'class'")
        if self.kind == "region" and self.rect_b is None:
            raise ValueError("region questions need rect_b")
        if self.kind == "class" and (self.class_a is None or self.class_b is None):
            raise ValueError("class questions need class_a and class_b")

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind, "truth": self.truth.value,
                   "rect_a": vars(self.rect_a)}
        if self.kind == "region":
            d["rect_b"] = vars(self.rect_b)
        else:
            d["class_a"] = self.class_a
            d["class_b"] = self.class_b
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DensityQuestion":
        kind = d["kind"]
        rect_a = Rect(**d["rect_a"])
        if kind == "region":
            return cls(kind=kind, rect_a=rect_a, rect_b=Rect(**d["rect_b"]),
                       truth=Ordering(d["truth"]))
        return cls(kind=kind, rect_a=rect_a, class_a=int(d["class_a"]),
                   class_b=int(d["class_b"]), truth=Ordering(d["truth"]))


def question_truth(ds: LabeledDataset, q: DensityQuestion) -> Ordering:
    """Evaluate a question on a full dataset (defines the question's truth)."""
    if q.kind == "region":
        return region_density_order(ds.points, q.rect_a, q.rect_b)
    return class_density_order(ds, q.rect_a, q.class_a, q.class_b)


def answer_question(ds: LabeledDataset, sample: SampleIndexSet, q: DensityQuestion) -> Ordering:
    """Evaluate a question on the sampled subset of ds."""
    sub = ds.subset(sample)
    if q.kind == "region":
        return region_density_order(sub.points, q.rect_a, q.rect_b)
    return class_density_order(sub, q.rect_a, q.class_a, q.class_b)


def question_accuracy(ds: LabeledDataset, sample: SampleIndexSet, questions) -> float:
    """Fraction of questions whose sampled ordering matches the recorded
    truth; a tied sampled ordering counts as wrong (a judge must choose)."""
    questions = list(questions)
    if not questions:
        raise ValueError("no questions to evaluate")
    hits = sum(
        1
        for q in questions
        if q.truth is not Ordering.TIE and answer_question(ds, sample, q) is q.truth
    )
    return hits / len(questions)


def _kde_field(ps: PointSet, bandwidth: float, grid: int) -> np.ndarray:
    """Gaussian KDE on a grid x grid lattice of cell centers, normalized to
    sum 1. Separable kernel: the field is a product of 1-D Gaussians."""
    centers = (np.arange(grid) + 0.5) / grid
    gx = np.exp(-((centers[None, :] - ps.xs[:, None]) ** 2) / (2.0 * bandwidth ** 2))
    gy = np.exp(-((centers[None, :] - ps.ys[:, None]) ** 2) / (2.0 * bandwidth ** 2))
    field = gx.T @ gy
    total = field.sum()
    if total <= 0.0:
        raise ValueError("degenerate density field (bandwidth too small?)")
    return field / total


def kde_error(full: PointSet, sample: PointSet, bandwidth: float = 0.02, grid: int = 64) -> float:
    """L1 distance between normalized KDE fields of two point sets (max 2)."""
    if bandwidth <= 0.0:
        raise ValueError("bandwidth must be positive")
    if full.n == 0 or sample.n == 0:
        raise ValueError("point sets must be non-empty")
    return float(np.abs(_kde_field(full, bandwidth, grid) - _kde_field(sample, bandwidth, grid)).sum())


def ranking_scores(ranks) -> np.ndarray:
    """Convert a tied ranking of k items into points: rank r earns k+1-r,
    and tied items share the mean of the points their positions span.

    Ranks must follow competition numbering: a group of m items tied at
    rank r occupies positions r..r+m-1, and the next rank is r+m.
    """
    r = np.asarray(ranks, dtype=np.int64)
    k = r.size
    if k == 0:
        raise ValueError("empty ranking")
    values, counts = np.unique(r, return_counts=True)
    expected = 1
    for v, m in zip(values, counts):
        if v != expected:
            raise ValueError(f"malformed ranking: expected rank {expected}, got {v}")
        expected += m
    scores = np.empty(k, dtype=np.float64)
    for v, m in zip(values, counts):
        span = np.arange(v, v + m)  # positions occupied by the tie group
        scores[r == v] = float(np.mean(k + 1 - span))
    return scores
