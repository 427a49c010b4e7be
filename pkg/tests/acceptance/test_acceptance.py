"""End-to-end checks at the sizes the package is expected to handle. The
slow ones are deselected by default; run them with `pytest -m slow`."""

import sys
import pathlib
import numpy as np
import pytest

parent_dir = pathlib.Path(__file__).resolve().parent.parent.parent
sys.path.append(str(parent_dir))


from dsiml._src.codes import BinaryCodeMatrix, hamming_distance, inner_product
from dsiml._src.data import InteractionSet
from dsiml._src.experiments import run_rq4
from dsiml._src.objective import Hyperparams
from dsiml._src.retrieval import benchmark_speedup
from dsiml._src.trainer import train_dsiml, train_siml
from dsiml.options import compute_options


@pytest.fixture
def setup_data():
    users = np.repeat(np.arange(4), 2)
    items = np.arange(8)
    data = InteractionSet(users, items, n_items=8, name="tiny")
    hp = Hyperparams(
        dim=8,
        n_neg=3,
        epochs=20,
        solver="exhaustive",
        max_iters=10,
        tol=0.0,
        resample_negatives=False,
    )
    return data, hp


@pytest.mark.parametrize("dim", [8, 20, 64])
def test_hamming_identity_many_pairs(dim):
    rng = np.random.default_rng(dim)
    a_signs = rng.choice(np.array([-1, 1], dtype=np.int8), size=(100_000, dim))
    b_signs = rng.choice(np.array([-1, 1], dtype=np.int8), size=(100_000, dim))
    a = BinaryCodeMatrix.from_signs(a_signs)
    b = BinaryCodeMatrix.from_signs(b_signs)
    inner = np.einsum("nd,nd->n", a_signs.astype(np.int64), b_signs.astype(np.int64))
    np.testing.assert_array_equal(hamming_distance(a, b), (dim - inner) // 2)
    np.testing.assert_array_equal(inner_product(a, b), inner)


@pytest.mark.slow
def test_retrieval_speedup():
    compute_options.set_n_threads(1)
    report = benchmark_speedup(100_000, 64, 100, seed=0)
    assert report.speedup >= 3.0


@pytest.mark.slow
def test_scale_invariant_beats_fixed_margin_on_imbalanced_spreads():
    report = run_rq4(
        seeds=list(range(10)),
        n_users=200,
        n_major=400,
        n_minor=40,
        spread_major=3.0,
        spread_minor=0.5,
        k=10,
        balanced_control=False,
    )
    assert report.relative_gap("imbalanced", "cml") >= 0.05


@pytest.mark.slow
def test_continuous_init_beats_random_signs(setup_data):
    data, hp = setup_data
    wins = 0
    for seed in range(10):
        run_hp = hp.replace(seed=seed)
        U, V, _ = train_siml(data, run_hp)
        rng = np.random.default_rng(seed)
        random_init = (
            BinaryCodeMatrix.from_signs(rng.choice([-1, 1], size=(4, hp.dim))),
            BinaryCodeMatrix.from_signs(rng.choice([-1, 1], size=(8, hp.dim))),
        )
        *_, from_siml = train_dsiml(data, run_hp, init=(U, V))
        *_, from_random = train_dsiml(data, run_hp, init=random_init)
        if from_siml.final_bound <= from_random.final_bound + 1e-12:
            wins += 1
    assert wins >= 7
