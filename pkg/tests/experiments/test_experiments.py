import sys
import pathlib
import json
import numpy as np
import pytest

parent_dir = pathlib.Path(__file__).resolve().parent.parent.parent
sys.path.append(str(parent_dir))


from dsiml._src.experiments import generate_imbalanced_synthetic, run_rq4, run_grid
from dsiml._src.metrics import evaluate_model
from dsiml._src.objective import Hyperparams
from dsiml._src.trainer import train_model


@pytest.fixture
def setup_data():
    data, geometry = generate_imbalanced_synthetic(
        n_users=30, n_major=60, n_minor=40, seed=3
    )
    hp = Hyperparams(dim=8, epochs=2, max_iters=2, bqp_restarts=2, seed=0)
    return {"data": data, "geometry": geometry, "hp": hp}


def test_synthetic_shape(setup_data):
    data = setup_data["data"]
    geometry = setup_data["geometry"]
    assert data.n_users == 30
    assert data.n_items == 100
    assert np.sum(geometry.item_cluster == 0) == 60
    assert np.sum(geometry.item_cluster == 1) == 40
    for u in range(data.n_users):
        positives = data.all_positives(u)
        assert len(positives) > 0
        assert len(data.train_positives(u)) > 0
        # users only like items of their own cluster
        assert np.all(geometry.item_cluster[positives] == geometry.user_cluster[u])


def test_synthetic_deterministic():
    a, _ = generate_imbalanced_synthetic(n_users=20, seed=5)
    b, _ = generate_imbalanced_synthetic(n_users=20, seed=5)
    c, _ = generate_imbalanced_synthetic(n_users=20, seed=6)
    assert a.to_dataframe().equals(b.to_dataframe())
    assert not a.to_dataframe().equals(c.to_dataframe())


def test_synthetic_invalid_inputs():
    with pytest.raises(ValueError):
        generate_imbalanced_synthetic(spread_major=0.5, spread_minor=3.0)
    with pytest.raises(ValueError):
        generate_imbalanced_synthetic(spread_major=1.0, spread_minor=1.0)
    with pytest.raises(ValueError):
        generate_imbalanced_synthetic(n_major=10, n_minor=10)
    with pytest.raises(ValueError):
        generate_imbalanced_synthetic(spread_minor=0.0)
    data, geometry = generate_imbalanced_synthetic(
        n_users=10, spread_major=1.0, spread_minor=1.0, allow_equal_spreads=True
    )
    assert np.allclose(geometry.spreads, 1.0)


def test_rq4_small(setup_data):
    report = run_rq4(
        seeds=[0, 1],
        hp=setup_data["hp"],
        n_users=30,
        n_major=60,
        n_minor=40,
        k=5,
    )
    df = report.to_dataframe()
    # one row per (setting, seed, model)
    assert len(df) == 2 * 2 * 2
    assert set(df["setting"]) == {"imbalanced", "balanced"}
    assert set(df["model"]) == {"siml", "cml"}
    assert df.groupby(["setting", "seed"]).size().eq(2).all()
    assert df["ndcg"].between(0, 1).all()
    assert np.isfinite(report.relative_gap())
    lines = [json.loads(line) for line in report.to_json_lines()]
    assert all(line["k"] == 5 for line in lines)
    assert "Scale-Invariant vs Fixed Margin" in str(report)
    fig = report.plot_comparison()
    assert fig is not None


def test_grid_single_cell_matches_direct_run(setup_data):
    data = setup_data["data"]
    hp = setup_data["hp"]
    seen = []
    report = run_grid(
        data,
        hp,
        gammas=[0.5],
        lambdas=[2.0],
        seeds=[1],
        mode="siml",
        ks=[5],
        on_cell=seen.append,
    )
    assert len(seen) == 1
    trained = train_model(data, hp.replace(gamma=0.5, lam=2.0, seed=1), mode="siml")
    direct = evaluate_model(*trained.ranking_representation, data, ks=[5])
    row = report.to_dataframe().iloc[0]
    assert row["gamma"] == 0.5 and row["lam"] == 2.0 and row["seed"] == 1
    assert row["ndcg"] == pytest.approx(direct.ndcg[5])
    assert row["hr"] == pytest.approx(direct.hr[5])
    assert report.best()["gamma"] == 0.5


def test_grid_order_and_sensitivity(setup_data):
    report = run_grid(
        setup_data["data"],
        setup_data["hp"].replace(epochs=1),
        gammas=[0.5, 1.0],
        lambdas=[0.1, 1.0],
        seeds=[0],
        mode="siml",
        ks=[5],
    )
    df = report.to_dataframe()
    assert len(df) == 4
    assert list(df["gamma"]) == [0.5, 0.5, 1.0, 1.0]
    assert len(report.sensitivity("gamma")) == 2
    assert len(report.to_json_lines()) == 4
    assert report.plot_sensitivity("lam") is not None
    assert "Hyperparameter Grid" in str(report)


def test_grid_rejects_invalid_values(setup_data):
    seen = []
    with pytest.raises(ValueError):
        run_grid(
            setup_data["data"],
            setup_data["hp"],
            gammas=[0.5, 2.0],
            lambdas=[1.0],
            seeds=[0],
            on_cell=seen.append,
        )
    # nothing ran before the invalid value was detected
    assert seen == []
