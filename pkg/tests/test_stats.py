import itertools

import numpy as np
import pytest

from scattersample.stats import (
    RankMatrix,
    conover_posthoc,
    friedman_test,
    holm_correction,
    wilcoxon_signed_rank,
)


def constant_rank_matrix(n=4, k=3):
    return RankMatrix(np.tile(np.arange(1.0, k + 1.0), (n, 1)))


class TestFriedman:
    def test_hand_derived_example(self):
        # 4 blocks x 3 treatments, ranks always (1,2,3):
        # chi2 = 12n/(k(k+1)) * sum(Rbar_j^2 ... ) = 8.0, df=2, p = exp(-4)
        res = friedman_test(constant_rank_matrix())
        assert res.statistic == pytest.approx(8.0, abs=1e-9)
        assert res.df == 2
        assert res.p_value == pytest.approx(np.exp(-4.0), abs=1e-9)

    def test_identical_columns_degenerate(self):
        res = friedman_test(RankMatrix(np.ones((5, 3))))
        assert res.degenerate
        assert res.statistic == 0.0
        assert res.p_value == 1.0

    def test_block_permutation_invariance(self):
        rng = np.random.default_rng(31)
        values = rng.random((8, 4))
        res1 = friedman_test(RankMatrix(values))
        res2 = friedman_test(RankMatrix(values[rng.permutation(8)]))
        assert res1.statistic == pytest.approx(res2.statistic, abs=1e-12)
        assert res1.p_value == pytest.approx(res2.p_value, abs=1e-12)

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(32)
        values = rng.random((6, 5))
        transformed = values.copy()
        transformed[::2] = np.exp(3 * transformed[::2])  # strictly increasing
        transformed[1::2] = transformed[1::2] ** 3 + 7.0
        res1 = friedman_test(RankMatrix(values))
        res2 = friedman_test(RankMatrix(transformed))
        assert res1.statistic == pytest.approx(res2.statistic, abs=1e-12)

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            RankMatrix(np.ones((1, 3)))
        with pytest.raises(ValueError):
            RankMatrix(np.ones((3, 1)))
        with pytest.raises(ValueError):
            RankMatrix(np.array([[1.0, np.nan], [2.0, 3.0]]))


class TestConover:
    def test_monotone_in_rank_sum_gap(self):
        p = conover_posthoc(constant_rank_matrix())
        # rank-sum gaps: |R1-R2| = 4, |R1-R3| = 8
        assert p[0, 2] < p[0, 1] < 1.0

    def test_symmetric_unit_diagonal(self):
        p = conover_posthoc(constant_rank_matrix())
        assert np.allclose(p, p.T)
        assert np.allclose(np.diag(p), 1.0)

    def test_identical_treatment_pair(self):
        values = np.array([[1.0, 1.0, 9.0],
                           [2.0, 2.0, 8.0],
                           [3.0, 3.0, 7.0],
                           [4.0, 4.0, 6.0]])
        p = conover_posthoc(RankMatrix(values), force=True)
        assert p[0, 1] == 1.0

    def test_gate_requires_friedman_significance(self):
        rng = np.random.default_rng(33)
        noise = RankMatrix(rng.random((4, 3)))
        fr = friedman_test(noise)
        if not fr.significant:
            with pytest.raises(ValueError):
                conover_posthoc(noise)
            conover_posthoc(noise, force=True)  # force bypasses the gate

    def test_holm_never_below_raw(self):
        raw = conover_posthoc(constant_rank_matrix())
        adj = conover_posthoc(constant_rank_matrix(), holm=True)
        assert np.all(adj >= raw - 1e-15)
        # helper is monotone too
        again = holm_correction(raw)
        assert np.allclose(again, adj)


def exact_p_by_enumeration(diffs):
    """Literal 2^n sign-pattern enumeration of the two-sided Wilcoxon p."""
    from scipy.stats import rankdata

    ranks = rankdata(np.abs(diffs))
    n = len(diffs)
    w_obs = float(ranks[np.asarray(diffs) > 0].sum())
    w_values = []
    for signs in itertools.product([0, 1], repeat=n):
        w_values.append(float(sum(r for s, r in zip(signs, ranks) if s)))
    w_values = np.asarray(w_values)
    p_le = np.mean(w_values <= w_obs)
    p_ge = np.mean(w_values >= w_obs)
    return min(1.0, 2.0 * min(p_le, p_ge))


class TestWilcoxon:
    def test_all_positive_n5(self):
        res = wilcoxon_signed_rank([1, 2, 3, 4, 5], [0, 0, 0, 0, 0])
        assert res.statistic == 0.0
        assert res.p_value == pytest.approx(0.0625, abs=1e-12)
        assert res.direction == 1

    def test_matches_enumeration_oracle(self):
        rng = np.random.default_rng(34)
        for n in (5, 8, 11):
            for _ in range(5):
                a = rng.normal(size=n)
                b = a + rng.normal(scale=0.8, size=n)
                d = a - b
                if np.any(d == 0):
                    continue
                res = wilcoxon_signed_rank(a, b)
                assert res.p_value == pytest.approx(exact_p_by_enumeration(d), abs=1e-12)

    def test_all_zero_differences_rejected(self):
        with pytest.raises(ValueError):
            wilcoxon_signed_rank([1.0, 2.0, 3.0, 4.0, 5.0], [1.0, 2.0, 3.0, 4.0, 5.0])

    def test_too_few_nonzero_rejected(self):
        with pytest.raises(ValueError):
            wilcoxon_signed_rank([1, 2, 3, 4], [0, 0, 0, 0])

    def test_swap_symmetry(self):
        rng = np.random.default_rng(35)
        a = rng.normal(size=12)
        b = a + rng.normal(scale=0.5, size=12)
        r1 = wilcoxon_signed_rank(a, b)
        r2 = wilcoxon_signed_rank(b, a)
        assert r1.p_value == pytest.approx(r2.p_value, abs=1e-12)
        assert r1.statistic == pytest.approx(r2.statistic, abs=1e-12)
        assert r1.direction == -r2.direction

    def test_large_n_normal_approximation(self):
        rng = np.random.default_rng(36)
        a = rng.normal(size=60)
        b = a + rng.normal(loc=0.4, scale=0.6, size=60)
        res = wilcoxon_signed_rank(a, b)
        assert 0.0 <= res.p_value <= 1.0
        assert res.direction == -1  # b systematically larger
        # agrees with the small shift being detectable
        assert res.p_value < 0.05
