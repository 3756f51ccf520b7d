"""Numba kernels for dart-throwing conflict checks.

Accepted points live in a uniform background grid stored as per-cell linked
lists (`head` maps a cell to its most recent point, `nxt` chains the rest),
so duplicate coordinates and coarse grids are handled exactly.
"""

from __future__ import annotations

import numpy as np
from numba import njit


def grid_geometry(radius: float, max_cells: int = 1024) -> tuple[float, int, int]:
    """Cell side, cell count per axis, and neighbor reach for a conflict radius.

    Targets cell side radius/sqrt(2); caps the grid at max_cells per axis so
    memory stays bounded for tiny radii (the chains absorb the difference).
    """
    ideal = radius / np.sqrt(2.0)
    ncell = max(1, min(int(1.0 / ideal), max_cells)) if ideal > 0 else 1
    cell = 1.0 / ncell
    reach = int(radius / cell) + 1
    return cell, ncell, reach


@njit(cache=True)
def dart_throw(xs, ys, order, radius, target, cell, ncell, reach):  # pragma: no cover
    """Greedy single-radius dart throwing over candidates in `order`.

    Accepts a candidate iff no previously accepted point lies strictly
    within `radius`. Stops as soon as `target` points are accepted; the
    prefix accepted by then is identical to the full pass's prefix.
    """
    n = xs.shape[0]
    head = np.full((ncell, ncell), -1, dtype=np.int64)
    nxt = np.full(n, -1, dtype=np.int64)
    out = np.empty(n, dtype=np.int64)
    count = 0
    r2 = radius * radius
    for t in range(order.shape[0]):
        i = order[t]
        x = xs[i]
        y = ys[i]
        ci = min(int(x / cell), ncell - 1)
        cj = min(int(y / cell), ncell - 1)
        ok = True
        for a in range(max(0, ci - reach), min(ncell, ci + reach + 1)):
            for b in range(max(0, cj - reach), min(ncell, cj + reach + 1)):
                j = head[a, b]
                while j >= 0:
                    dx = x - xs[j]
                    dy = y - ys[j]
                    if dx * dx + dy * dy < r2:
                        ok = False
                        break
                    j = nxt[j]
                if not ok:
                    break
            if not ok:
                break
        if ok:
            nxt[i] = head[ci, cj]
            head[ci, cj] = i
            out[count] = i
            count += 1
            if count >= target:
                break
    return out[:count]


@njit(cache=True)
def multiclass_fill(xs, ys, labels, order, radius_matrix, quota_remaining,
                    cell, ncell, reach, head, nxt, accepted, count):  # pragma: no cover
    """One dart-throwing round of multi-class filling.

    Candidates whose class quota is already met are skipped. A candidate of
    class c conflicts with an accepted point of class c' at distance
    < radius_matrix[c, c']. Mutates the grid, `accepted` andatomically
    `quota_remaining`; returns the new accepted count.
    """
    total_remaining = 0
    for c in range(quota_remaining.shape[0]):
        total_remaining += quota_remaining[c]
    for t in range(order.shape[0]):
        if total_remaining <= 0:
            break
        i = order[t]
        c = labels[i]
        if quota_remaining[c] <= 0:
            continue
        x = xs[i]
        y = ys[i]
        ci = min(int(x / cell), ncell - 1)
        cj = min(int(y / cell), ncell - 1)
        ok = True
        for a in range(max(0, ci - reach), min(ncell, ci + reach + 1)):
            for b in range(max(0, cj - reach), min(ncell, cj + reach + 1)):
                j = head[a, b]
                while j >= 0:
                    rr = radius_matrix[c, labels[j]]
                    dx = x - xs[j]
                    dy = y - ys[j]
                    if dx * dx + dy * dy < rr * rr:
                        ok = False
                        break
                    j = nxt[j]
                if not ok:
                    break
            if not ok:
                break
        if ok:
            nxt[i] = head[ci, cj]
            head[ci, cj] = i
            accepted[count] = i
            count += 1
            quota_remaining[c] -= 1
            total_remaining -= 1
    return count


@njit(cache=True)
def rebuild_grid(xs, ys, accepted, count, cell, ncell, head, nxt):  # pragma: no cover
    """Re-insert already accepted points into a cleared grid."""
    for t in range(count):
        i = accepted[t]
        ci = min(int(xs[i] / cell), ncell - 1)
        cj = min(int(ys[i] / cell), ncell - 1)
        nxt[i] = head[ci, cj]
        head[ci, cj] = i
