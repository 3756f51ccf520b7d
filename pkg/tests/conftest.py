import numpy as np
import pytest

from scattersample.core import LabeledDataset, PointSet
from scattersample.harness import MixtureSpec, gen_gaussian_mixture


def make_dataset(xs, ys, labels=None) -> LabeledDataset:
    """Dataset from raw arrays without normalization (coords must be in [0,1])."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if labels is None:
        labels = np.zeros(len(xs), dtype=np.int64)
    return LabeledDataset(PointSet(xs, ys), np.asarray(labels, dtype=np.int64))


def mixture(classes=3, n=2000, seed=7) -> LabeledDataset:
    return gen_gaussian_mixture(MixtureSpec(classes=classes, n=n, seed=seed))


def min_pairwise_distance(xy: np.ndarray) -> float:
    """Brute-force O(n^2) closest-pair distance."""
    if xy.shape[0] < 2:
        return np.inf
    diff = xy[:, None, :] - xy[None, :, :]
    d2 = (diff ** 2).sum(axis=2)
    np.fill_diagonal(d2, np.inf)
    return float(np.sqrt(d2.min()))


@pytest.fixture(scope="session")
def mixture_small():
    return mixture(classes=3, n=2000, seed=7)


@pytest.fixture(scope="session")
def mixture_medium():
    return mixture(classes=5, n=10_000, seed=11)
