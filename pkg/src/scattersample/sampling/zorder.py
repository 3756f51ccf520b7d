"""Multi-view Z-order sampling.

Points are sorted along a Morton (Z-order) curve once for the whole dataset
and once per class. Each ordering is cut into contiguous equal-count
segments, and a greedy set cover picks points until every segment of every
view contains a selected point; covering a whole-view and a class-view
segment with one point is what keeps the result near the requested size.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from ..core import LabeledDataset, SampleIndexSet
from .params import SamplingParams

__all__ = [
    "morton_key",
    "morton_keys",
    "sample_multiview_zorder",
    "sample_multiview_zorder_with_details",
    "MultiViewCover",
]

_QUANT_MAX = (1 << 16) - 1


def _spread_bits(v: np.ndarray) -> np.ndarray:
    """Spread 16-bit values so their bits occupy even positions of 32 bits."""
    v = v.astype(np.uint32)
    v = (v | (v << np.uint32(8))) & np.uint32(0x00FF00FF)
    v = (v | (v << np.uint32(4))) & np.uint32(0x0F0F0F0F)
    v = (v | (v << np.uint32(2))) & np.uint32(0x33333333)
    v = (v | (v << np.uint32(1))) & np.uint32(0x55555555)
    return v


def morton_keys(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorized 32-bit Morton keys; x occupies the even bit positions."""
    qx = np.floor(np.asarray(xs, dtype=np.float64) * _QUANT_MAX).astype(np.uint32)
    qy = np.floor(np.asarray(ys, dtype=np.float64) * _QUANT_MAX).astype(np.uint32)
    return _spread_bits(qx) | (_spread_bits(qy) << np.uint32(1))


def morton_key(x: float, y: float) -> int:
    """Morton key of one point; coordinates must lie in [0, 1]."""
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise ValueError("coordinates must lie in [0, 1]")
    return int(morton_keys(np.array([x]), np.array([y]))[0])


@dataclass(frozen=True)
class MultiViewCover:
    """The segmentation actually covered by a multi-view Z-order sample.

    segments: list of index arrays, one per segment over all views.
    whole_segments / class_segments: how many segments each view received
    (class_segments[c] may be 0 for rare classes).
    """

    segments: list
    whole_segments: int
    class_segments: np.ndarray


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def _build_segments(
    ds: LabeledDataset, budget: int, class_views: bool = True
) -> tuple[MultiViewCover, np.ndarray, np.ndarray]:
    """Cut the whole-view and per-class Morton orders into segments.

    Returns the cover description plus per-point segment ids
    (whole_seg[i], class_seg[i]); class_seg is -1 where the class received
    no segments (or class views are disabled entirely).
    """
    keys = morton_keys(ds.points.xs, ds.points.ys)
    ratios = np.bincount(ds.labels, minlength=ds.n_classes) / ds.n

    whole_order = np.argsort(keys, kind="stable")
    whole_seg = np.empty(ds.n, dtype=np.int64)
    segments: list[np.ndarray] = []
    for seg_id, seg in enumerate(np.array_split(whole_order, budget)):
        whole_seg[seg] = seg_id
        segments.append(seg)

    class_counts = np.zeros(ds.n_classes, dtype=np.int64)
    class_seg = np.full(ds.n, -1, dtype=np.int64)
    next_id = budget
    for c in range(ds.n_classes if class_views else 0):
        members = np.flatnonzero(ds.labels == c)
        n_seg = min(_round_half_up(budget * ratios[c]), members.size)
        class_counts[c] = n_seg
        if n_seg == 0:
            continue
        order_c = members[np.argsort(keys[members], kind="stable")]
        for seg in np.array_split(order_c, n_seg):
            class_seg[seg] = next_id
            segments.append(seg)
            next_id += 1

    cover = MultiViewCover(segments=segments, whole_segments=budget, class_segments=class_counts)
    return cover, whole_seg, class_seg


def _greedy_cover(whole_seg: np.ndarray, class_seg: np.ndarray, n_segments: int) -> np.ndarray:
    """Greedy max-coverage: repeatedly take the point covering the most
    uncovered segments, ties to the lowest point index. Lazy heap entries
    are revalidated on pop (coverage counts only ever decrease)."""
    n = whole_seg.size
    covered = np.zeros(n_segments, dtype=bool)
    remaining = n_segments

    def gain(i: int) -> int:
        g = 0 if covered[whole_seg[i]] else 1
        cs = class_seg[i]
        if cs >= 0 and not covered[cs]:
            g += 1
        return g

    heap = [(-2 if class_seg[i] >= 0 else -1, i) for i in range(n)]
    heapq.heapify(heap)
    picks = []
    while remaining > 0:
        neg, i = heapq.heappop(heap)
        g = gain(i)
        if g != -neg:
            if g > 0:
                heapq.heappush(heap, (-g, i))
            continue
        picks.append(i)
        for seg in (whole_seg[i], class_seg[i]):
            if seg >= 0 and not covered[seg]:
                covered[seg] = True
                remaining -= 1
    return _prune_cover(picks, whole_seg, class_seg, n_segments)


def _prune_cover(picks: list, whole_seg: np.ndarray, class_seg: np.ndarray, n_segments: int) -> np.ndarray:
    """Reverse-deletion cleanup: drop picks whose segments stay covered
    without them (latest, lowest-gain picks are examined first)."""
    count = np.zeros(n_segments, dtype=np.int64)
    for i in picks:
        count[whole_seg[i]] += 1
        if class_seg[i] >= 0:
            count[class_seg[i]] += 1
    drop = set()
    for i in reversed(picks):
        segs = [whole_seg[i]] + ([class_seg[i]] if class_seg[i] >= 0 else [])
        if all(count[s] >= 2 for s in segs):
            for s in segs:
                count[s] -= 1
            drop.add(i)
    return np.asarray([i for i in picks if i not in drop], dtype=np.int64)


def sample_multiview_zorder_with_details(
    ds: LabeledDataset, p: SamplingParams
) -> tuple[SampleIndexSet, MultiViewCover]:
    """Multi-view Z-order sample plus the segmentation it covers.

    The first attempt uses a segment budget equal to target_n; when the
    greedy cover overshoots the size tolerance, the budget is nudged by the
    observed surplus and the views are rebuilt (the cover size is roughly
    monotone in the budget), keeping the closest result.
    """
    n = ds.n
    if not 1 <= p.target_n <= n:
        raise ValueError(f"target_n must lie in [1, {n}]")
    allowed = p.rate_tolerance * p.target_n

    sizes: dict[int, int] = {}
    best: tuple[int, np.ndarray, MultiViewCover] | None = None
    best_under: tuple[int, np.ndarray, MultiViewCover] | None = None
    budget = p.target_n
    for _ in range(48):
        cover, whole_seg, class_seg = _build_segments(ds, budget)
        picks = _greedy_cover(whole_seg, class_seg, len(cover.segments))
        sizes[budget] = picks.size
        gap = abs(picks.size - p.target_n)
        if best is None or gap < best[0]:
            best = (gap, picks, cover)
        if picks.size <= p.target_n and (best_under is None or picks.size > best_under[1].size):
            best_under = (gap, picks, cover)
        if gap <= allowed:
            break
        # Cover size grows with the segment budget: follow the surplus, and
        # once budgets on both sides exist, bisect between them.
        budget -= picks.size - p.target_n
        if budget in sizes or not 1 <= budget <= n:
            unders = [b for b, s in sizes.items() if s <= p.target_n]
            overs = [b for b, s in sizes.items() if s > p.target_n]
            if not unders and overs:
                budget = min(overs) // 2  # force an undershooting attempt
                if budget < 1 or budget in sizes:
                    break
                continue
            if not unders or not overs:
                break
            budget = (max(unders) + min(overs)) // 2
            if budget in sizes:
                break
    if best is not None and best[0] <= allowed:
        _, picks, cover = best
    elif best_under is not None:
        # Close the remaining gap from below: extra points never uncover a
        # segment, so padding with the lowest unchosen indices keeps the
        # cover valid while hitting target_n exactly.
        _, picks, cover = best_under
        chosen = np.zeros(n, dtype=bool)
        chosen[picks] = True
        pad = np.flatnonzero(~chosen)[: p.target_n - picks.size]
        picks = np.concatenate([picks, pad])
    else:
        # Tiny targets: even one segment per class view already forces more
        # picks than requested. Fall back to the whole view alone, which
        # yields exactly one pick per segment.
        cover, whole_seg, class_seg = _build_segments(ds, p.target_n, class_views=False)
        picks = _greedy_cover(whole_seg, class_seg, len(cover.segments))
    return SampleIndexSet.from_any_order(picks, n=n), cover


def sample_multiview_zorder(ds: LabeledDataset, p: SamplingParams) -> SampleIndexSet:
    """Sample of roughly target_n points covering every Z-order segment."""
    return sample_multiview_zorder_with_details(ds, p)[0]
