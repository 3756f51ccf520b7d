import numpy as np
import pytest

from scattersample.core import PointSet, Rect, SampleIndexSet
from scattersample.metrics import (
    DensityQuestion,
    Ordering,
    answer_question,
    class_density_order,
    kde_error,
    normalized_recall,
    outlier_preservation_ratio,
    precision_recall,
    question_accuracy,
    ranking_scores,
    region_density_order,
)
from scattersample.outliers import OutlierGroundTruth

from conftest import make_dataset


def truth_of(indices):
    s = SampleIndexSet.from_any_order(indices)
    return OutlierGroundTruth(s, np.ones(len(s), bool), np.zeros(len(s), bool))


class TestPrecisionRecall:
    def test_partial_overlap(self):
        pr = precision_recall(SampleIndexSet.from_any_order([1, 2, 3]), truth_of([2, 3, 4]))
        assert pr.precision == pytest.approx(2 / 3)
        assert pr.recall == pytest.approx(2 / 3)
        assert (pr.m_size, pr.n_size, pr.overlap) == (3, 3, 2)

    def test_identity(self):
        pr = precision_recall(SampleIndexSet.from_any_order([5, 9]), truth_of([5, 9]))
        assert pr.precision == 1.0
        assert pr.recall == 1.0

    def test_empty_marked_set(self):
        pr = precision_recall(SampleIndexSet(np.zeros(0, int)), truth_of([1, 2]))
        assert pr.precision is None
        assert pr.recall == 0.0
        assert not pr.recall_degenerate

    def test_randomized_against_set_oracle(self):
        rng = np.random.default_rng(99)
        for _ in range(1000):
            universe = 50
            m = rng.choice(universe, rng.integers(0, 20), replace=False)
            n = rng.choice(universe, rng.integers(1, 20), replace=False)
            pr = precision_recall(SampleIndexSet.from_any_order(m), truth_of(n))
            ms, ns = set(m.tolist()), set(n.tolist())
            assert pr.overlap == len(ms & ns)
            if ms:
                assert pr.precision == pytest.approx(len(ms & ns) / len(ms))
            else:
                assert pr.precision is None
            assert pr.recall == pytest.approx(len(ms & ns) / len(ns))


class TestNormalizedRecall:
    def test_division_by_max(self):
        values, degenerate = normalized_recall([0.2, 0.4])
        assert np.allclose(values, [0.5, 1.0])
        assert not degenerate

    def test_all_equal(self):
        values, _ = normalized_recall([0.3, 0.3, 0.3])
        assert np.allclose(values, 1.0)

    def test_all_zero_flagged(self):
        values, degenerate = normalized_recall([0.0, 0.0])
        assert np.allclose(values, 0.0)
        assert degenerate

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            normalized_recall([-0.1, 0.5])


class TestPreservationRatio:
    def test_containment(self):
        assert outlier_preservation_ratio(
            SampleIndexSet.from_any_order(range(20)), truth_of([3, 7])
        ) == 1.0

    def test_disjoint(self):
        assert outlier_preservation_ratio(
            SampleIndexSet.from_any_order([10, 11]), truth_of([1, 2])
        ) == 0.0

    def test_half(self):
        assert outlier_preservation_ratio(
            SampleIndexSet.from_any_order([0, 1, 2, 3, 4]), truth_of(range(10))
        ) == 0.5

    def test_empty_truth_rejected(self):
        empty = OutlierGroundTruth(SampleIndexSet(np.zeros(0, int)),
                                   np.zeros(0, bool), np.zeros(0, bool))
        with pytest.raises(ValueError):
            outlier_preservation_ratio(SampleIndexSet.from_any_order([1]), empty)


class TestDensityOrders:
    def test_region_count_comparison(self):
        xs = np.concatenate([np.full(10, 0.15), np.full(2, 0.75)])
        ys = np.full(12, 0.15)
        ps = PointSet(xs, ys)
        a, b = Rect(0.1, 0.1, 0.2, 0.2), Rect(0.7, 0.1, 0.2, 0.2)
        assert region_density_order(ps, a, b) is Ordering.A

    def test_region_tie(self):
        ps = PointSet(np.array([0.15, 0.75]), np.array([0.15, 0.15]))
        a, b = Rect(0.1, 0.1, 0.2, 0.2), Rect(0.7, 0.1, 0.2, 0.2)
        assert region_density_order(ps, a, b) is Ordering.TIE

    def test_region_area_weighting(self):
        # 5 points each, but B is a quarter of A's area
        xs = np.concatenate([0.1 + 0.02 * np.arange(5), 0.7 + 0.02 * np.arange(5)])
        ys = np.full(10, 0.12)
        ps = PointSet(xs, ys)
        a, b = Rect(0.08, 0.1, 0.2, 0.2), Rect(0.68, 0.1, 0.1, 0.1)
        assert region_density_order(ps, a, b) is Ordering.B

    def test_class_order_and_errors(self):
        xs = np.concatenate([0.2 + 0.01 * np.arange(8), 0.2 + 0.01 * np.arange(3)])
        ys = np.full(11, 0.2)
        ds = make_dataset(xs, ys, [0] * 8 + [1] * 3)
        r = Rect(0.1, 0.1, 0.2, 0.2)
        assert class_density_order(ds, r, 0, 1) is Ordering.A
        assert class_density_order(ds, r, 1, 0) is Ordering.B
        with pytest.raises(ValueError):
            class_density_order(ds, r, 0, 0)
        with pytest.raises(ValueError):
            class_density_order(ds, r, 0, 5)

    def test_class_tie(self):
        ds = make_dataset([0.2, 0.25], [0.2, 0.2], [0, 1])
        assert class_density_order(ds, Rect(0.1, 0.1, 0.2, 0.2), 0, 1) is Ordering.TIE


class TestKdeError:
    def test_identical_sets_zero(self):
        rng = np.random.default_rng(17)
        ps = PointSet(rng.random(500), rng.random(500))
        assert kde_error(ps, ps) <= 1e-12

    def test_disjoint_masses_near_two(self):
        a = PointSet(np.full(50, 0.1), np.full(50, 0.1))
        b = PointSet(np.full(50, 0.9), np.full(50, 0.9))
        assert kde_error(a, b, bandwidth=0.01) == pytest.approx(2.0, abs=1e-6)

    def test_symmetry(self):
        rng = np.random.default_rng(18)
        a = PointSet(rng.random(300), rng.random(300))
        b = PointSet(rng.random(100), rng.random(100))
        assert kde_error(a, b) == pytest.approx(kde_error(b, a), abs=1e-12)

    def test_validation(self):
        ps = PointSet(np.array([0.5]), np.array([0.5]))
        with pytest.raises(ValueError):
            kde_error(ps, ps, bandwidth=0.0)
        with pytest.raises(ValueError):
            kde_error(PointSet(np.zeros(0), np.zeros(0)), ps)


class TestRankingScores:
    def test_strict_ranking(self):
        assert np.array_equal(ranking_scores([1, 2, 3, 4, 5, 6, 7]),
                              [7, 6, 5, 4, 3, 2, 1])

    def test_tie_for_first(self):
        scores = ranking_scores([1, 1, 3, 4, 5, 6, 7])
        assert scores[0] == scores[1] == pytest.approx(6.5)
        assert scores[2] == 5.0

    def test_all_tied(self):
        assert np.allclose(ranking_scores([1] * 7), 4.0)

    def test_total_points_preserved(self):
        rng = np.random.default_rng(23)
        for _ in range(200):
            values = rng.integers(0, 4, 7)  # many ties
            order = np.argsort(values, kind="stable")
            ranks = np.empty(7, dtype=int)
            pos = 1
            for v in np.unique(values):
                group = np.flatnonzero(values == v)
                ranks[group] = pos
                pos += group.size
            assert ranking_scores(ranks).sum() == pytest.approx(28.0)

    def test_malformed_rejected(self):
        with pytest.raises(ValueError):
            ranking_scores([1, 2, 2, 3, 5, 6, 7])  # rank 4 skipped incorrectly
        with pytest.raises(ValueError):
            ranking_scores([2, 3, 4, 5, 6, 7, 8])


class TestQuestions:
    def test_answer_and_accuracy(self):
        xs = np.concatenate([0.12 + 0.01 * np.arange(10), [0.75, 0.76]])
        ys = np.full(12, 0.15)
        ds = make_dataset(xs, ys)
        q = DensityQuestion(kind="region", rect_a=Rect(0.1, 0.1, 0.2, 0.2),
                            rect_b=Rect(0.7, 0.1, 0.2, 0.2), truth=Ordering.A)
        full = SampleIndexSet.from_any_order(range(12))
        assert answer_question(ds, full, q) is Ordering.A
        assert question_accuracy(ds, full, [q]) == 1.0
        # a sample with one point on each side ties, and a tie counts wrong
        tied = SampleIndexSet.from_any_order([0, 10])
        assert answer_question(ds, tied, q) is Ordering.TIE
        assert question_accuracy(ds, tied, [q]) == 0.0

    def test_question_roundtrip(self):
        q = DensityQuestion(kind="class", rect_a=Rect(0.1, 0.2, 0.2, 0.2),
                            class_a=0, class_b=2, truth=Ordering.B)
        assert DensityQuestion.from_dict(q.to_dict()) == q
