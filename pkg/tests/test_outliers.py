import numpy as np
import pytest

from scattersample.core import LabeledDataset, PointSet
from scattersample.outliers import (
    class_purity_scores,
    ground_truth_outliers,
    lof_scores,
)

from conftest import make_dataset


def regular_grid(m):
    g = np.linspace(0.05, 0.95, m)
    gx, gy = np.meshgrid(g, g)
    return gx.ravel(), gy.ravel()


class TestLofScores:
    def test_regular_grid_interior_is_homogeneous(self):
        xs, ys = regular_grid(12)
        sv = lof_scores(PointSet(xs, ys), k=8)
        interior = (xs > 0.2) & (xs < 0.8) & (ys > 0.2) & (ys < 0.8)
        # tie-heavy lattice neighborhoods keep raw LOF near but not at 1
        assert np.all(np.abs(sv.raw[interior] - 1.0) < 0.15)
        assert np.all(sv.scores[interior] < 0.5)

    def test_far_point_has_max_raw_lof(self):
        rng = np.random.default_rng(3)
        cluster = rng.normal(0.3, 0.005, size=(100, 2))
        far = np.array([[0.3 + 0.1, 0.3]])  # ~10x the cluster diameter away
        pts = np.clip(np.vstack([cluster, far]), 0, 1)
        sv = lof_scores(PointSet(pts[:, 0], pts[:, 1]), k=5)
        assert int(np.argmax(sv.raw)) == 100
        assert sv.scores[100] == 1.0

    def test_k_bounds(self):
        xs, ys = regular_grid(3)
        with pytest.raises(ValueError):
            lof_scores(PointSet(xs, ys), k=len(xs))
        with pytest.raises(ValueError):
            lof_scores(PointSet(xs, ys), k=0)

    def test_uniform_scatter_sanity_band(self):
        rng = np.random.default_rng(12345)
        xs, ys = rng.random(2000), rng.random(2000)
        sv = lof_scores(PointSet(xs, ys), k=20)
        inside = np.mean((sv.raw >= 0.8) & (sv.raw <= 1.3))
        assert inside > 0.9

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(8)
        xs, ys = rng.random(200), rng.random(200)
        perm = rng.permutation(200)
        a = lof_scores(PointSet(xs, ys), k=10)
        b = lof_scores(PointSet(xs[perm], ys[perm]), k=10)
        assert np.allclose(a.raw[perm], b.raw, atol=1e-12)

    def test_duplicate_points_do_not_crash(self):
        xs = np.array([0.5] * 5 + [0.1, 0.9])
        ys = np.array([0.5] * 5 + [0.1, 0.9])
        sv = lof_scores(PointSet(xs, ys), k=3)
        assert np.all(np.isfinite(sv.raw))


class TestClassPurity:
    def test_single_class_all_zero(self):
        rng = np.random.default_rng(4)
        ds = make_dataset(rng.random(50), rng.random(50))
        assert np.all(class_purity_scores(ds, k=5).scores == 0.0)

    def test_surrounded_intruder_scores_one(self):
        rng = np.random.default_rng(5)
        xs = np.concatenate([[0.5], 0.5 + rng.normal(0, 0.01, 30)])
        ys = np.concatenate([[0.5], 0.5 + rng.normal(0, 0.01, 30)])
        labels = np.array([1] + [0] * 30)
        ds = make_dataset(np.clip(xs, 0, 1), np.clip(ys, 0, 1), labels)
        assert class_purity_scores(ds, k=10).scores[0] == 1.0

    def test_half_differing_neighbors(self):
        # target at center; 5 same-label and 5 other-label points nearby,
        # everything else far away
        xs = [0.5]
        ys = [0.5]
        labels = [0]
        for i in range(5):
            xs.append(0.5 + 0.001 * (i + 1))
            ys.append(0.5)
            labels.append(0)
        for i in range(5):
            xs.append(0.5 - 0.001 * (i + 1))
            ys.append(0.5)
            labels.append(1)
        for i in range(20):
            xs.append(0.05 + 0.002 * i)
            ys.append(0.05)
            labels.append(i % 2)
        ds = make_dataset(xs, ys, labels)
        assert class_purity_scores(ds, k=10).scores[0] == pytest.approx(0.5)

    def test_scale_invariance(self):
        rng = np.random.default_rng(6)
        xs, ys = rng.random(120), rng.random(120)
        labels = rng.integers(0, 3, 120)
        a = class_purity_scores(make_dataset(xs, ys, labels), k=8)
        b = class_purity_scores(make_dataset(0.5 * xs + 0.1, 0.5 * ys + 0.2, labels), k=8)
        assert np.array_equal(a.scores, b.scores)

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(9)
        xs, ys = rng.random(150), rng.random(150)
        labels = rng.integers(0, 2, 150)
        perm = rng.permutation(150)
        a = class_purity_scores(make_dataset(xs, ys, labels), k=7)
        b = class_purity_scores(make_dataset(xs[perm], ys[perm], labels[perm]), k=7)
        assert np.allclose(a.scores[perm], b.scores, atol=1e-12)


def planted_dataset():
    """Two tight clusters + 10 cross-class intruders + 5 spatial strays.

    Returns (dataset, planted_indices).
    """
    rng = np.random.default_rng(42)
    a = rng.normal([0.3, 0.3], 0.02, size=(200, 2))
    b = rng.normal([0.7, 0.7], 0.02, size=(200, 2))
    intruders = rng.normal([0.3, 0.3], 0.01, size=(10, 2))  # labeled as class 1
    # strays sit at comparable isolation so min-max keeps all of them high
    strays = np.array([[0.1, 0.9], [0.9, 0.1], [0.05, 0.6], [0.6, 0.05], [0.95, 0.45]])
    pts = np.clip(np.vstack([a, b, intruders, strays]), 0, 1)
    labels = np.array([0] * 200 + [1] * 200 + [1] * 10 + [0] * 5)
    ds = LabeledDataset(PointSet(pts[:, 0], pts[:, 1]), labels)
    return ds, set(range(400, 415))


class TestGroundTruth:
    def test_empty_when_scores_below_thresholds(self):
        # symmetric square: every raw LOF identical, so normalization
        # collapses to zero; single class keeps purity at zero
        ds = make_dataset([0.2, 0.8, 0.2, 0.8], [0.2, 0.2, 0.8, 0.8])
        truth = ground_truth_outliers(ds, k_lof=2, k_pur=2)
        assert len(truth) == 0

    def test_union_of_detectors(self):
        ds, _ = planted_dataset()
        truth = ground_truth_outliers(ds)
        from scattersample.outliers import lof_scores as lf, class_purity_scores as cp

        lof_set = set(np.flatnonzero(lf(ds.points, 20).scores >= 0.5))
        pur_set = set(np.flatnonzero(cp(ds, 10).scores >= 0.8))
        assert truth.indices.as_set() == lof_set | pur_set

    def test_planted_outliers_all_detected(self):
        ds, planted = planted_dataset()
        truth = ground_truth_outliers(ds)
        assert planted <= truth.indices.as_set()

    def test_source_flags(self):
        ds, _ = planted_dataset()
        truth = ground_truth_outliers(ds)
        assert np.all(truth.from_lof | truth.from_purity)

    def test_threshold_validation(self):
        ds, _ = planted_dataset()
        with pytest.raises(ValueError):
            ground_truth_outliers(ds, lof_thresh=1.5)
