"""Nonparametric significance tests for blocked strategy comparisons.

friedman_test uses the tie-corrected chi-square form
    T = (k-1) * sum_j (R_j - n(k+1)/2)^2 / (A - C),
with A the sum of squared within-block ranks and C = n k (k+1)^2 / 4; with
no ties this reduces to the familiar 12/(nk(k+1)) sum R_j^2 - 3n(k+1).

conover_posthoc compares rank sums with a t reference on (n-1)(k-1) degrees
of freedom and standard error sqrt(2n(A - C) / ((n-1)(k-1))). The textbook
statistic carries an extra factor 1 - T/(n(k-1)) that collapses to zero for
perfectly consistent rankings, sending every pairwise p to 0 or 0/0; it is
omitted here so p-values stay finite and monotone in the rank-sum gap.

wilcoxon_signed_rank is exact (full sign-pattern distribution, organized as
a convolution) up to 25 non-zero differences, then switches to the normal
approximation with tie and continuity corrections.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as _sps

__all__ = [
    "RankMatrix",
    "TestResult",
    "friedman_test",
    "conover_posthoc",
    "wilcoxon_signed_rank",
    "holm_correction",
]

_EXACT_LIMIT = 25


@dataclass(frozen=True)
class RankMatrix:
    """Blocks x treatments measurement table (one block per dataset or
    question, one treatment per strategy)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ValueError("rank matrix must be 2-D (blocks x treatments)")
        n, k = v.shape
        if n < 2 or k < 2:
            raise ValueError("need at least 2 blocks and 2 treatments")
        if not np.all(np.isfinite(v)):
            raise ValueError("missing or non-finite cells are not allowed")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n_blocks(self) -> int:
        return self.values.shape[0]

    @property
    def n_treatments(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class TestResult:
    statistic: float
    df: int
    p_value: float
    alpha: float = 0.05
    degenerate: bool = False
    direction: int | None = None  # wilcoxon: sign of the a-minus-b tendency

    @property
    def significant(self) -> bool:
        return not self.degenerate and self.p_value < self.alpha


def _within_block_ranks(values: np.ndarray) -> np.ndarray:
    return np.apply_along_axis(_sps.rankdata, 1, values)


def friedman_test(m: RankMatrix, alpha: float = 0.05) -> TestResult:
    """Tie-corrected Friedman chi-square test across treatment columns."""
    ranks = _within_block_ranks(m.values)
    n, k = ranks.shape
    col_sums = ranks.sum(axis=0)
    a1 = float((ranks ** 2).sum())
    c1 = n * k * (k + 1) ** 2 / 4.0
    df = k - 1
    if a1 == c1:  # every block fully tied: no information
        return TestResult(0.0, df, 1.0, alpha, degenerate=True)
    stat = (k - 1) * float(((col_sums - n * (k + 1) / 2.0) ** 2).sum()) / (a1 - c1)
    p = float(_sps.chi2.sf(stat, df))
    return TestResult(stat, df, p, alpha)


def conover_posthoc(
    m: RankMatrix,
    alpha: float = 0.05,
    force: bool = False,
    holm: bool = False,
) -> np.ndarray:
    """Pairwise two-sided p-values on Friedman rank sums (k x k, diagonal 1).

    Gated on Friedman significance at `alpha`; pass force=True to bypass the
    gate for exploration. p-values are raw unless holm=True.
    """
    fr = friedman_test(m, alpha)
    if not force and not fr.significant:
        raise ValueError(
            f"Friedman test not significant (p={fr.p_value:.4f} >= {alpha}); "
            "post-hoc comparisons are gated (use force=True to override)"
        )
    ranks = _within_block_ranks(m.values)
    n, k = ranks.shape
    col_sums = ranks.sum(axis=0)
    a1 = float((ranks ** 2).sum())
    c1 = n * k * (k + 1) ** 2 / 4.0
    df = (n - 1) * (k - 1)
    se = np.sqrt(2.0 * n * (a1 - c1) / df) if a1 > c1 else 0.0
    p = np.ones((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            gap = abs(col_sums[i] - col_sums[j])
            if se == 0.0:
                pij = 1.0 if gap == 0.0 else 0.0
            else:
                pij = float(2.0 * _sps.t.sf(gap / se, df))
            p[i, j] = p[j, i] = min(1.0, pij)
    if holm:
        p = holm_correction(p)
    return p


def holm_correction(p: np.ndarray) -> np.ndarray:
    """Holm step-down adjustment of a symmetric pairwise p-value matrix."""
    k = p.shape[0]
    pairs = [(p[i, j], i, j) for i in range(k) for j in range(i + 1, k)]
    pairs.sort()
    out = np.ones((k, k))
    m = len(pairs)
    running = 0.0
    for rank, (pij, i, j) in enumerate(pairs):
        adj = min(1.0, (m - rank) * pij)
        running = max(running, adj)  # enforce monotonicity
        out[i, j] = out[j, i] = running
    return out


def _exact_wilcoxon_p(scaled_ranks: np.ndarray, w_plus_scaled: int) -> float:
    """Two-sided exact p over all 2^n sign patterns via subset-sum counts.

    scaled_ranks are the tied ranks doubled to integers; the distribution of
    the (scaled) positive-rank sum is built by convolution, which tallies
    exactly the 2^n equally likely sign assignments.
    """
    total = int(scaled_ranks.sum())
    dist = np.zeros(total + 1)
    dist[0] = 1.0
    for r in scaled_ranks:
        shifted = np.zeros_like(dist)
        shifted[r:] = dist[: total + 1 - r]
        dist = dist + shifted
    dist /= dist.sum()
    p_le = float(dist[: w_plus_scaled + 1].sum())
    p_ge = float(dist[w_plus_scaled:].sum())
    return min(1.0, 2.0 * min(p_le, p_ge))


def wilcoxon_signed_rank(paired_a, paired_b, alpha: float = 0.05) -> TestResult:
    """Two-sided Wilcoxon signed-rank test on paired measurements."""
    a = np.asarray(paired_a, dtype=np.float64)
    b = np.asarray(paired_b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("paired samples must be 1-D with equal length")
    d = a - b
    d = d[d != 0.0]
    n = d.size
    if n == 0:
        raise ValueError("all paired differences are zero")
    if n < 5:
        raise ValueError(f"need at least 5 non-zero differences, got {n}")
    ranks = _sps.rankdata(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    statistic = min(w_plus, w_minus)
    direction = int(np.sign(w_plus - w_minus))

    if n <= _EXACT_LIMIT:
        scaled = np.round(ranks * 2).astype(np.int64)
        p = _exact_wilcoxon_p(scaled, int(round(w_plus * 2)))
    else:
        mu = n * (n + 1) / 4.0
        _, tie_counts = np.unique(ranks, return_counts=True)
        var = n * (n + 1) * (2 * n + 1) / 24.0 - float(((tie_counts ** 3) - tie_counts).sum()) / 48.0
        dev = w_plus - mu
        z = (dev - 0.5 * np.sign(dev)) / np.sqrt(var)
        p = float(min(1.0, 2.0 * _sps.norm.sf(abs(z))))
    return TestResult(statistic, 0, p, alpha, direction=direction)
