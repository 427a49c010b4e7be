import sys
import pathlib
import json
import numpy as np
import pytest
import matplotlib.pyplot as plt

parent_dir = pathlib.Path(__file__).resolve().parent.parent.parent
sys.path.append(str(parent_dir))


from dsiml._src.data import InteractionSet
from dsiml._src.objective import Hyperparams
from dsiml._src.trainer import (
    TrainReport,
    train_model,
    save_checkpoint,
    load_checkpoint,
)
from dsiml._src.display.print_utils import strip_ansi


@pytest.fixture
def setup_data():
    rng = np.random.default_rng(0)
    users, items = [], []
    for u in range(6):
        chosen = rng.choice(12, size=3, replace=False)
        users.extend([u] * 3)
        items.extend(chosen.tolist())
    data = InteractionSet(np.array(users), np.array(items), n_items=12)
    hp = Hyperparams(dim=6, n_neg=2, epochs=3, max_iters=2, bqp_restarts=2)
    return data, hp


@pytest.mark.parametrize(
    "mode, metric", [("siml", "inner"), ("cml", "euclidean"), ("bpr", "inner")]
)
def test_continuous_modes(setup_data, mode, metric):
    data, hp = setup_data
    trained = train_model(data, hp, mode)
    assert trained.metric == metric
    assert trained.user_codes is None and trained.item_codes is None
    U, V = trained.ranking_representation
    assert (U.rows, V.rows) == (6, 12)
    assert len(trained.reports) == 1


def test_dsiml_mode(setup_data):
    data, hp = setup_data
    trained = train_model(data, hp, "dsiml")
    assert trained.metric == "hamming"
    B, D = trained.ranking_representation
    assert (B.rows, D.rows, B.dim) == (6, 12, 6)
    assert [r.model for r in trained.reports] == ["siml", "dsiml"]
    with pytest.raises(ValueError):
        train_model(data, hp, "lightgcn")


def test_report_outputs():
    report = TrainReport("dsiml", {"gamma": 1.0})
    report.record(1, "refresh_users", 3.0, 3.0, 0.1)
    report.record(1, "user_codes", 2.5, 2.8, 0.2)
    report.mark_converged()
    report.set_checksums(user_codes="abcd")

    assert report.n_iterations == 1
    assert report.final_bound() == 2.8
    assert report.is_monotone()
    df = report.to_dataframe()
    assert list(df.columns) == ["iteration", "step", "bound", "objective", "elapsed"]
    lines = [json.loads(line) for line in report.to_json_lines()]
    assert len(lines) == 3
    assert lines[0]["type"] == "step" and lines[0]["model"] == "dsiml"
    assert lines[-1]["type"] == "summary"
    assert lines[-1]["checksums"] == {"user_codes": "abcd"}
    text = strip_ansi(str(report))
    assert "Training Report" in text
    assert "abcd" in text
    fig = report.plot_trajectory()
    assert isinstance(fig, plt.Figure)

    continuous = TrainReport("siml")
    continuous.record(0, "init", 2.0)
    continuous.record(1, "epoch", 2.5)
    assert not continuous.is_monotone()
    assert np.isnan(continuous.final_bound())
    assert json.loads(continuous.to_json_lines()[0])["bound"] is None


def test_checkpoint_round_trip(setup_data, tmp_path):
    data, hp = setup_data
    trained = train_model(data, hp, "dsiml")
    written = save_checkpoint(
        tmp_path / "model",
        user_embeddings=trained.user_embeddings,
        item_embeddings=trained.item_embeddings,
        user_codes=trained.user_codes,
        item_codes=trained.item_codes,
        reports=trained.reports,
        metadata={"mode": "dsiml", "hyperparams": hp.to_dict()},
    )
    assert len(written) == 6
    parts = load_checkpoint(tmp_path / "model")
    assert parts["user_codes"] == trained.user_codes
    assert parts["item_embeddings"] == trained.item_embeddings
    assert parts["metadata"]["mode"] == "dsiml"
    assert parts["metadata"]["hyperparams"]["dim"] == 6
    lines = (tmp_path / "model" / "report.jsonl").read_text().splitlines()
    assert sum(json.loads(line)["type"] == "summary" for line in lines) == 2

    siml_only = load_checkpoint(tmp_path / "missing")
    assert siml_only == {}
