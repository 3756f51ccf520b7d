"""Small shared numeric helpers."""

from __future__ import annotations

import numpy as np


def largest_remainder(weights, total: int) -> np.ndarray:
    """Apportion `total` integer slots proportionally to nonnegative weights.

    Floors the exact shares, then hands the leftover slots to the largest
    fractional remainders (ties to the lowest index). Sums to `total` exactly.
    """
    w = np.asarray(weights, dtype=np.float64)
    if total < 0:
        raise ValueError("total must be non-negative")
    if w.ndim != 1 or w.size == 0:
        raise ValueError("weights must be a non-empty 1-D array")
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    s = w.sum()
    if s <= 0:
        raise ValueError("weights must not all be zero")
    shares = w * (total / s)
    base = np.floor(shares).astype(np.int64)
    leftover = total - int(base.sum())
    if leftover > 0:
        frac = shares - base
        order = np.lexsort((np.arange(w.size), -frac))
        base[order[:leftover]] += 1
    return base


def bounded_largest_remainder(weights, total: int, lower, upper) -> np.ndarray:
    """Largest-remainder apportionment under per-entry box constraints.

    Requires sum(lower) <= total <= sum(upper) and lower <= upper elementwise.
    Deterministic: slots move to the largest fractional remainder first (ties
    to the lowest index) and are reclaimed from the smallest remainder first
    (ties to the highest index).
    """
    w = np.asarray(weights, dtype=np.float64)
    lo = np.asarray(lower, dtype=np.int64)
    hi = np.asarray(upper, dtype=np.int64)
    if np.any(lo > hi):
        raise ValueError("lower bound exceeds upper bound")
    if int(lo.sum()) > total or int(hi.sum()) < total:
        raise ValueError("box constraints cannot reach the requested total")
    s = w.sum()
    shares = w * (total / s) if s > 0 else np.zeros_like(w)
    base = np.clip(np.floor(shares).astype(np.int64), lo, hi)
    frac = shares - np.floor(shares)
    add_order = np.lexsort((np.arange(w.size), -frac))
    del_order = np.lexsort((-np.arange(w.size), frac))
    guard = 0
    while base.sum() < total:
        for i in add_order:
            if base[i] < hi[i]:
                base[i] += 1
                if base.sum() >= total:
                    break
        guard += 1
        if guard > total + w.size:
            raise RuntimeError("apportionment failed to converge")
    guard = 0
    while base.sum() > total:
        for i in del_order:
            if base[i] > lo[i]:
                base[i] -= 1
                if base.sum() <= total:
                    break
        guard += 1
        if guard > total + w.size:
            raise RuntimeError("apportionment failed to converge")
    return base
