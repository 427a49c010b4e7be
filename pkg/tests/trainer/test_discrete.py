import sys
import pathlib
import numpy as np
import pytest

parent_dir = pathlib.Path(__file__).resolve().parent.parent.parent
sys.path.append(str(parent_dir))


from dsiml._src.codes import BinaryCodeMatrix, EmbeddingMatrix
from dsiml._src.data import InteractionSet
from dsiml._src.objective import Hyperparams
from dsiml._src.trainer import train_dsiml, train_siml
from dsiml.options import compute_options


@pytest.fixture
def setup_data():
    # 4 users, 8 items
    users = np.repeat(np.arange(4), 2)
    items = np.array([0, 1, 2, 3, 4, 5, 6, 7])
    data = InteractionSet(users, items, n_items=8, name="tiny")
    hp = Hyperparams(
        dim=8,
        n_neg=3,
        epochs=10,
        solver="exhaustive",
        max_iters=10,
        tol=0.0,
        resample_negatives=False,
        seed=5,
    )
    return data, hp


def _random_init(data, hp, seed=0):
    rng = np.random.default_rng(seed)
    return (
        BinaryCodeMatrix.from_signs(rng.choice([-1, 1], size=(data.n_users, hp.dim))),
        BinaryCodeMatrix.from_signs(rng.choice([-1, 1], size=(data.n_items, hp.dim))),
    )


def test_monotone_and_tight(setup_data):
    data, hp = setup_data
    B, D, report = train_dsiml(data, hp, init=_random_init(data, hp))
    df = report.to_dataframe()
    assert list(df["step"][:4]) == [
        "refresh_users",
        "user_codes",
        "refresh_items",
        "item_codes",
    ]
    assert 1 <= report.n_iterations <= 10
    assert report.is_monotone(slack=1e-9)
    refreshed = df[df["step"].isin(["refresh_users", "refresh_items"])]
    np.testing.assert_allclose(refreshed["bound"], refreshed["objective"], atol=1e-9)
    # bound majorizes the objective everywhere
    assert np.all(df["bound"] >= df["objective"] - 1e-9)
    assert (B.rows, B.dim) == (4, 8)
    assert (D.rows, D.dim) == (8, 8)
    assert set(np.unique(B.to_signs())) <= {-1, 1}


def test_monotone_with_flip_solver(setup_data):
    data, hp = setup_data
    _, _, report = train_dsiml(
        data, hp.replace(solver="flip", bqp_restarts=4), init=_random_init(data, hp, 1)
    )
    assert report.is_monotone(slack=1e-6)


def test_infinite_tolerance_single_iteration(setup_data):
    data, hp = setup_data
    _, _, report = train_dsiml(
        data, hp.replace(tol=float("inf")), init=_random_init(data, hp)
    )
    assert report.n_iterations == 1
    assert len(report.records) == 4
    assert report.converged


def test_embedding_init_and_default(setup_data):
    data, hp = setup_data
    U, V, _ = train_siml(data, hp)
    B1, D1, _ = train_dsiml(data, hp.replace(max_iters=2), init=(U, V))
    B2, D2, _ = train_dsiml(data, hp.replace(max_iters=2))
    assert B1 == B2 and D1 == D2
    with pytest.raises(TypeError):
        train_dsiml(data, hp, init=(np.ones((4, 8)), np.ones((8, 8))))
    with pytest.raises(ValueError):
        train_dsiml(
            data,
            hp,
            init=(EmbeddingMatrix(np.ones((4, 3))), EmbeddingMatrix(np.ones((8, 3)))),
        )


def test_threads_do_not_change_result(setup_data):
    data, hp = setup_data
    hp = hp.replace(solver="flip", max_iters=3)
    init = _random_init(data, hp, 2)
    B1, D1, r1 = train_dsiml(data, hp, init=init)
    compute_options.set_n_threads(4)
    try:
        B2, D2, r2 = train_dsiml(data, hp, init=init)
    finally:
        compute_options.set_n_threads(1)
    assert B1 == B2 and D1 == D2
    np.testing.assert_array_equal(r1.bound_trajectory(), r2.bound_trajectory())


def test_resampling_changes_batches(setup_data):
    data, hp = setup_data
    init = _random_init(data, hp)
    _, _, report = train_dsiml(
        data, hp.replace(resample_negatives=True, max_iters=3), init=init
    )
    # a fresh batch every iteration; each iteration is still monotone
    df = report.to_dataframe()
    for _, rows in df.groupby("iteration"):
        assert np.all(np.diff(rows["bound"].to_numpy()) <= 1e-9)
