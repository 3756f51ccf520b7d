"""Blue noise sampling, single and multi-class.

Both variants throw darts over a background grid and binary-search the disk
radius until the requested count fits. The multi-class variant searches one
radius per class, uses min(r_c, r_c') as the cross-class conflict radius,
and halves every radius between rounds when quotas cannot be filled.
"""

from __future__ import annotations

import numpy as np

from .._util import largest_remainder
from ..core import LabeledDataset, SampleIndexSet, class_ratios
from . import _kernels
from .params import BlueNoiseParams, SamplingParams

__all__ = [
    "sample_blue_noise",
    "sample_blue_noise_with_radius",
    "sample_multiclass_blue_noise",
    "sample_multiclass_blue_noise_with_radii",
]

_MAX_HALVINGS = 10


def _throw(xs, ys, order, radius, target):
    cell, ncell, reach = _kernels.grid_geometry(radius)
    return _kernels.dart_throw(xs, ys, order, radius, target, cell, ncell, reach)


def _search_radius(xs, ys, order, target, bp: BlueNoiseParams):
    """Largest radius in [r_lo, r_hi] whose dart throw accepts >= target points.

    Returns (accepted indices into xs/ys, radius). Greedy acceptance depends
    only on earlier candidates, so stopping a pass at `target` accepts tells
    us the full pass would reach the target too.
    """
    accepted = _throw(xs, ys, order, bp.r_hi, target)
    if accepted.size >= target:
        return accepted, bp.r_hi
    accepted = _throw(xs, ys, order, bp.r_lo, target)
    if accepted.size < target:
        raise RuntimeError(
            f"radius search failed to bracket: even r_lo={bp.r_lo} accepts only "
            f"{accepted.size} < {target} points (duplicates or r_lo too large)"
        )
    lo, hi = bp.r_lo, bp.r_hi
    best = (accepted, lo)
    for _ in range(bp.max_radius_iters):
        mid = 0.5 * (lo + hi)
        accepted = _throw(xs, ys, order, mid, target)
        if accepted.size >= target:
            lo = mid
            best = (accepted, mid)
        else:
            hi = mid
    return best


def sample_blue_noise_with_radius(
    ds: LabeledDataset, p: SamplingParams, bp: BlueNoiseParams | None = None
) -> tuple[SampleIndexSet, float]:
    """Blue noise sample plus the final disk radius it satisfies.

    No two returned points lie strictly closer than the returned radius.
    """
    bp = bp or BlueNoiseParams()
    n = ds.n
    if p.target_n < 1:
        raise ValueError("blue noise sampling needs target_n >= 1")
    if p.target_n > n:
        raise ValueError(f"target_n={p.target_n} exceeds dataset size {n}")
    if p.target_n == n:
        return SampleIndexSet(np.arange(n)), 0.0
    rng = np.random.default_rng(p.seed)
    order = rng.permutation(n)
    accepted, radius = _search_radius(ds.points.xs, ds.points.ys, order, p.target_n, bp)
    if accepted.size > p.target_n:
        keep = rng.choice(accepted.size, size=p.target_n, replace=False)
        accepted = accepted[keep]
    return SampleIndexSet.from_any_order(accepted, n=n), radius


def sample_blue_noise(
    ds: LabeledDataset, p: SamplingParams, bp: BlueNoiseParams | None = None
) -> SampleIndexSet:
    """Evenly spaced sample of exactly target_n points (empty-disk property)."""
    return sample_blue_noise_with_radius(ds, p, bp)[0]


def sample_multiclass_blue_noise_with_radii(
    ds: LabeledDataset, p: SamplingParams, bp: BlueNoiseParams | None = None
) -> tuple[SampleIndexSet, np.ndarray]:
    """Multi-class blue noise sample plus the final per-class disk radii.

    Per-class quotas follow the class ratios (largest remainder). Radii are
    searched per class as in the single-class case; rounds that cannot fill
    the quotas halve every radius (up to 10 times, then drop to zero) and
    retry the remaining candidates, so coarse spacing is kept where possible
    and relaxed only as needed. Within each class, no two returned points
    lie strictly closer than that class's returned radius (vacuous at 0).
    """
    bp = bp or BlueNoiseParams()
    n, k = ds.n, ds.n_classes
    if p.target_n > n:
        raise ValueError(f"target_n={p.target_n} exceeds dataset size {n}")
    if p.target_n < k:
        raise ValueError(f"target_n={p.target_n} below class count {k}")

    xs, ys, labels = ds.points.xs, ds.points.ys, ds.labels
    quotas = largest_remainder(class_ratios(ds), p.target_n)
    rng = np.random.default_rng(p.seed)

    # Per-class radii, searched on each class alone (consumes rng in class
    # order). A class whose quota cannot be bracketed at any positive radius
    # (duplicate-heavy coordinates) gets radius 0: spacing is vacuous there
    # but the quota stays fillable.
    radii = np.empty(k)
    for c in range(k):
        members = np.flatnonzero(labels == c)
        if quotas[c] == 0:
            radii[c] = bp.r_lo
            continue
        if quotas[c] == members.size:
            radii[c] = 0.0  # class taken whole; spacing vacuous
            continue
        order_c = members[rng.permutation(members.size)]
        try:
            _, radii[c] = _search_radius(xs, ys, order_c, int(quotas[c]), bp)
        except RuntimeError:
            radii[c] = 0.0

    radius_matrix = np.minimum.outer(radii, radii)
    quota_remaining = quotas.copy()
    selected = np.zeros(n, dtype=bool)
    accepted = np.empty(n, dtype=np.int64)
    nxt = np.full(n, -1, dtype=np.int64)
    count = 0
    final_radii = radii.copy()
    done = quota_remaining == 0

    # Hierarchical rounds: dart-throw the unfilled classes, halving every
    # radius between rounds. The final round drops the still-unfilled
    # classes' radii to 0 (no spacing constraint), so the quota contract
    # holds even for coordinates no positive radius could separate.
    for halving in range(_MAX_HALVINGS + 2):
        active = quota_remaining > 0
        if not active.any():
            break
        if halving > _MAX_HALVINGS:
            radii[active] = 0.0
            radius_matrix[active, :] = 0.0
            radius_matrix[:, active] = 0.0
        candidates = np.flatnonzero(~selected & active[labels])
        order = candidates[rng.permutation(candidates.size)]
        r_max = float(radii[active].max())
        cell, ncell, reach = _kernels.grid_geometry(max(r_max, 1e-12))
        head = np.full((ncell, ncell), -1, dtype=np.int64)
        _kernels.rebuild_grid(xs, ys, accepted, count, cell, ncell, head, nxt)
        count = _kernels.multiclass_fill(
            xs, ys, labels, order, radius_matrix, quota_remaining,
            cell, ncell, reach, head, nxt, accepted, count,
        )
        selected[accepted[:count]] = True
        just_done = (quota_remaining == 0) & ~done
        final_radii[just_done] = radii[just_done]
        done |= just_done
        if not (quota_remaining > 0).any():
            break
        radii *= 0.5
        radius_matrix *= 0.5

    return SampleIndexSet.from_any_order(accepted[:count], n=n), final_radii


def sample_multiclass_blue_noise(
    ds: LabeledDataset, p: SamplingParams, bp: BlueNoiseParams | None = None
) -> SampleIndexSet:
    """Blue noise sample that keeps each class evenly spaced as well."""
    return sample_multiclass_blue_noise_with_radii(ds, p, bp)[0]
