import sys
import pathlib
import numpy as np
import pytest
from scipy.stats import chisquare

parent_dir = pathlib.Path(__file__).resolve().parent.parent.parent
sys.path.append(str(parent_dir))


from dsiml._src.data import (
    InteractionSet,
    sample_negatives,
    sample_npair_batch,
    iter_user_batches,
)
from dsiml._src.utils.errors import SamplingError


@pytest.fixture
def setup_data():
    # user 0: train {0, 1}, test {2}; user 1: train {3}
    users = np.array([0, 0, 0, 1])
    items = np.array([0, 1, 2, 3])
    is_test = np.array([False, False, True, False])
    return InteractionSet(users, items, is_test, n_items=10)


def test_batch_shape(setup_data):
    batch = sample_npair_batch(setup_data, np.array([0]), n_neg=5, seed=1)
    assert len(batch.users) == 2
    assert batch.negatives.shape == (2, 5)
    assert batch.n_triplets == 10
    u, i, j = batch.triplets()
    assert len(u) == len(i) == len(j) == 10


def test_negatives_never_positive(setup_data):
    batch = sample_npair_batch(setup_data, n_neg=6, seed=3)
    for t, u in enumerate(batch.users):
        negatives = batch.negatives[t]
        assert len(set(negatives.tolist())) == 6
        assert not np.isin(negatives, setup_data.all_positives(u)).any()
        assert batch.positives[t] in setup_data.train_positives(u)


def test_determinism(setup_data):
    a = sample_npair_batch(setup_data, n_neg=3, seed=11)
    b = sample_npair_batch(setup_data, n_neg=3, seed=11)
    np.testing.assert_array_equal(a.negatives, b.negatives)


def test_forced_choice():
    data = InteractionSet(np.array([0, 0]), np.array([0, 1]), n_items=3)
    batch = sample_npair_batch(data, n_neg=1, seed=0)
    np.testing.assert_array_equal(batch.negatives.ravel(), [2, 2])


def test_sampling_error():
    data = InteractionSet(np.array([0, 0]), np.array([0, 1]), n_items=3)
    with pytest.raises(SamplingError):
        sample_npair_batch(data, n_neg=2)
    with pytest.raises(ValueError):
        sample_npair_batch(data, n_neg=0)


def test_uniform_frequency():
    positives = np.array([1, 4, 5, 8])
    n_items = 12
    rng = np.random.default_rng(0)
    draws = np.concatenate(
        [sample_negatives(positives, n_items, 1, rng) for _ in range(10_000)]
    )
    assert not np.isin(draws, positives).any()
    pool = np.setdiff1d(np.arange(n_items), positives)
    counts = np.array([(draws == j).sum() for j in pool])
    assert counts.sum() == 10_000
    assert chisquare(counts).pvalue > 1e-4


def test_user_batches_partition():
    rng = np.random.default_rng(5)
    chunks = list(iter_user_batches(10, 4, rng))
    assert [len(c) for c in chunks] == [4, 4, 2]
    np.testing.assert_array_equal(np.sort(np.concatenate(chunks)), np.arange(10))
