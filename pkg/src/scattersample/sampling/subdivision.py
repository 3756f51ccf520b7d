"""Recursive subdivision based sampling.

The unit square is split into a binary KD-tree (median cut on the
wider-extent axis, expanding the node with the largest mass x area first)
until there is one leaf per requested sample. A top-down pass then
apportions per-class quotas to each subtree in proportion to its class
counts, with two safeguards: a subtree can never be asked for more samples
of a class than it has leaves containing that class, and any subtree whose
total quota reaches the class count gives every class present in it at
least one slot. Each leaf finally contributes the point of its assigned
class closest to the leaf centroid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import heapq

import numpy as np

from .._util import bounded_largest_remainder
from ..core import LabeledDataset, SampleIndexSet
from .params import SamplingParams

__all__ = ["sample_recursive_subdivision"]


@dataclass
class _Node:
    lo: int
    hi: int  # owns perm[lo:hi]
    counts: np.ndarray
    left: "_Node | None" = None
    right: "_Node | None" = None
    n_leaves: int = 1
    avail: np.ndarray = field(default=None)  # per class: leaves below containing it

    @property
    def size(self) -> int:
        return self.hi - self.lo


def _split_priority(size: int, xs_seg: np.ndarray, ys_seg: np.ndarray) -> float:
    """Mass x bounding-box area. Equalizing this across leaves makes the
    sampled density grow monotonically with the source density (roughly its
    square root) while still spending leaves on wide sparse regions, which
    is what lets isolated points survive to their own leaves."""
    w = float(xs_seg.max() - xs_seg.min())
    h = float(ys_seg.max() - ys_seg.min())
    return size * (w * h + 1e-12)


def _build_tree(ds: LabeledDataset, target_leaves: int) -> tuple[_Node, list[_Node], np.ndarray]:
    xs, ys, labels = ds.points.xs, ds.points.ys, ds.labels
    k = ds.n_classes
    perm = np.arange(ds.n, dtype=np.int64)
    root = _Node(0, ds.n, np.bincount(labels, minlength=k))
    # Each split adds exactly one leaf, so expansion stops at exactly
    # target_leaves (or once every leaf is a singleton). Only splittable
    # nodes enter the heap.
    seq = 0
    heap = []
    if root.size > 1:
        heap.append((-_split_priority(root.size, xs, ys), seq, root))
    n_leaves = 1
    while n_leaves < target_leaves and heap:
        _, _, node = heapq.heappop(heap)
        seg = perm[node.lo:node.hi]
        ext_x = xs[seg].max() - xs[seg].min()
        ext_y = ys[seg].max() - ys[seg].min()
        coords = xs[seg] if ext_x >= ext_y else ys[seg]
        seg_sorted = seg[np.lexsort((seg, coords))]
        perm[node.lo:node.hi] = seg_sorted
        mid = node.lo + node.size // 2
        left = _Node(node.lo, mid, np.bincount(labels[perm[node.lo:mid]], minlength=k))
        right = _Node(mid, node.hi, node.counts - left.counts)
        node.left, node.right = left, right
        for child in (left, right):
            seq += 1
            if child.size > 1:
                child_seg = perm[child.lo:child.hi]
                heapq.heappush(
                    heap,
                    (-_split_priority(child.size, xs[child_seg], ys[child_seg]), seq, child),
                )
        n_leaves += 1

    leaves: list[_Node] = []

    def finish(node: _Node):
        if node.left is None:
            node.n_leaves = 1
            node.avail = (node.counts > 0).astype(np.int64)
            leaves.append(node)
        else:
            finish(node.left)
            finish(node.right)
            node.n_leaves = node.left.n_leaves + node.right.n_leaves
            node.avail = node.left.avail + node.right.avail

    finish(root)
    return root, leaves, perm


def _split_quota(qvec: np.ndarray, a: _Node, b: _Node, node: _Node, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Split a node's per-class quota vector between its two children."""
    la, lb = a.n_leaves, b.n_leaves
    with np.errstate(invalid="ignore", divide="ignore"):
        w = np.where(node.counts > 0, qvec * a.counts / np.maximum(node.counts, 1), 0.0)
    upper = np.minimum(qvec, a.avail)
    lower = np.maximum(qvec - b.avail, 0)
    if la >= k:
        lower = np.maximum(lower, ((a.counts > 0) & (qvec > 0)).astype(np.int64))
    lower = np.minimum(lower, upper)
    # Degenerate splits: shed the presence guarantee, then the hard lowers
    # (largest class id first), and widen uppers to full availability; the
    # sibling rebalance below absorbs whatever this distorts.
    if int(lower.sum()) > la:
        hard = np.maximum(qvec - b.avail, 0)
        order = np.lexsort((np.arange(k), a.counts))
        for c in order:
            if lower.sum() <= la:
                break
            lower[c] = min(lower[c], hard[c])
        while lower.sum() > la:
            c = int(np.lexsort((-np.arange(k), -lower))[0])
            lower[c] -= 1
    if int(upper.sum()) < la:
        upper = a.avail.copy()
        lower = np.minimum(lower, upper)
    qa = bounded_largest_remainder(w, la, lower, upper)
    qb = np.clip(qvec - qa, 0, b.avail)
    # Rebalance the sibling so its quota sums to its leaf count. Deviations
    # only exist after a repair above; shed units where the pair exceeds the
    # parent quota first and never strip a class's last combined unit, so a
    # root-guaranteed class cannot be starved on the way down.
    diff = lb - int(qb.sum())
    combined = qa + qb
    if diff > 0:
        shorted = np.maximum(qvec - combined, 0)
        head = b.avail - qb
        order = np.lexsort((np.arange(k), -b.counts, -shorted))
        while diff > 0:
            moved = False
            for c in order:
                if diff == 0:
                    break
                if head[c] > 0:
                    qb[c] += 1
                    head[c] -= 1
                    diff -= 1
                    moved = True
            if not moved:
                raise RuntimeError("quota rebalance ran out of availability")
    elif diff < 0:
        overflow = np.maximum(combined - qvec, 0)
        for protect_last in (True, False):
            order = np.lexsort((-np.arange(k), b.counts, -overflow))
            while diff < 0:
                moved = False
                for c in order:
                    if diff == 0:
                        break
                    keep_floor = 1 if (protect_last and qvec[c] >= 1 and qa[c] == 0) else 0
                    if qb[c] > keep_floor:
                        qb[c] -= 1
                        overflow[c] = max(overflow[c] - 1, 0)
                        diff += 1
                        moved = True
                if not moved:
                    break
            if diff == 0:
                break
    return qa, qb


def _assign_classes(root: _Node, quota: np.ndarray, k: int) -> dict[int, int]:
    """Descend the tree, returning {id(leaf): class} for every leaf."""
    assignment: dict[int, int] = {}
    stack = [(root, quota)]
    while stack:
        node, qvec = stack.pop()
        if node.left is None:
            c = int(np.argmax(qvec))  # exactly one class holds the single slot
            assignment[id(node)] = c
            continue
        qa, qb = _split_quota(qvec, node.left, node.right, node, k)
        stack.append((node.left, qa))
        stack.append((node.right, qb))
    return assignment


def _ensure_presence(
    leaves: list, perm: np.ndarray, labels: np.ndarray,
    assignment: dict[int, int], counts: np.ndarray, k: int
) -> None:
    """Give every class with data at least one leaf when slots allow.

    Split-level quotas track per-class availability but not joint (matching)
    feasibility: a leaf holding only one class can silently displace another
    class's unit during the repairs. Flipping a leaf to a starved class,
    taking from the donor class with the most slots, restores the guarantee
    deterministically.
    """
    if len(leaves) < k:
        return
    slots = np.zeros(k, dtype=np.int64)
    for leaf in leaves:
        slots[assignment[id(leaf)]] += 1
    for _ in range(k * k):
        missing = [c for c in range(k) if counts[c] > 0 and slots[c] == 0]
        if not missing:
            break
        c = missing[0]
        best = None  # maximize donor slots, tie to the lowest leaf index
        for li, leaf in enumerate(leaves):
            donor = assignment[id(leaf)]
            if donor == c:
                continue
            seg = perm[leaf.lo:leaf.hi]
            if np.any(labels[seg] == c):
                key = (slots[donor], -li)
                if best is None or key > best[0]:
                    best = (key, leaf, donor)
        if best is None:
            break
        _, leaf, donor = best
        assignment[id(leaf)] = c
        slots[c] += 1
        slots[donor] -= 1


def sample_recursive_subdivision(ds: LabeledDataset, p: SamplingParams) -> SampleIndexSet:
    """KD-tree subdivision sample with density-proportional class quotas."""
    n, k = ds.n, ds.n_classes
    if not 1 <= p.target_n <= n:
        raise ValueError(f"target_n must lie in [1, {n}]")
    if p.target_n == n:
        return SampleIndexSet(np.arange(n))

    root, leaves, perm = _build_tree(ds, p.target_n)
    total = len(leaves)

    lower = np.ones(k, dtype=np.int64) if total >= k else np.zeros(k, dtype=np.int64)
    lower = np.minimum(lower, root.avail)
    quota = bounded_largest_remainder(root.counts.astype(np.float64), total, lower, root.avail)

    assignment = _assign_classes(root, quota, k)
    xs, ys, labels = ds.points.xs, ds.points.ys, ds.labels
    _ensure_presence(leaves, perm, labels, assignment, root.counts, k)
    picks = np.empty(total, dtype=np.int64)
    for i, leaf in enumerate(leaves):
        seg = perm[leaf.lo:leaf.hi]
        c = assignment[id(leaf)]
        members = seg[labels[seg] == c]
        cx, cy = xs[seg].mean(), ys[seg].mean()
        d2 = (xs[members] - cx) ** 2 + (ys[members] - cy) ** 2
        picks[i] = members[np.lexsort((members, d2))[0]]
    return SampleIndexSet.from_any_order(picks, n=n)
