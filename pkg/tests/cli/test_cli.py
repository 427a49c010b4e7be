import sys
import pathlib
import json
import pytest

parent_dir = pathlib.Path(__file__).resolve().parent.parent.parent
sys.path.append(str(parent_dir))


from dsiml.cli import main, build_parser, RunConfig, UsageError


HP = ["--dim", "8", "--epochs", "2", "--iters", "2", "--restarts", "2"]


def _run(*argv) -> int:
    return main([str(a) for a in argv])


def _write_log(path: pathlib.Path, n_users: int, n_items: int):
    lines = []
    for u in range(n_users):
        for j in range(8):
            lines.append(f"u{u}\ti{(u + j) % n_items}\t5")
        # below the rating threshold, dropped
        lines.append(f"u{u}\ti{(u + 9) % n_items}\t0.5")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _json_lines(text: str) -> list[dict]:
    return [json.loads(line) for line in text.splitlines() if line.strip()]


@pytest.fixture
def setup_data(tmp_path, capsys):
    raw = tmp_path / "log.tsv"
    _write_log(raw, n_users=12, n_items=15)
    out = tmp_path / "prepared"
    assert _run("prepare", "--data", raw, "--min-degree", 0, "--out", out) == 0
    capsys.readouterr()
    return {"tmp": tmp_path, "raw": raw, "data": out}


def test_prepare(setup_data, capsys):
    out = setup_data["data"]
    assert (out / "train.tsv").is_file()
    assert (out / "test.tsv").is_file()
    raw = setup_data["raw"]
    assert _run("prepare", "--data", raw, "--min-degree", 0, "--out", out) == 0
    record = _json_lines(capsys.readouterr().out)[0]
    assert record["users"] == 12
    assert record["items"] == 15
    # 8 positives per user, one of them held out
    assert record["test"] == 12
    assert record["train"] == 12 * 7


def test_prepare_missing_file(tmp_path):
    assert _run("prepare", "--data", tmp_path / "nope.tsv", "--out", tmp_path) == 2


def test_prepare_undecodable_file(tmp_path, capsys):
    raw = tmp_path / "latin.tsv"
    raw.write_bytes(b"u1\ti1\t5\nu2\t\xff\xfe\t5\n")
    assert _run("prepare", "--data", raw, "--out", tmp_path / "out") == 3
    assert capsys.readouterr().out == ""


def test_prepare_non_finite_rating(tmp_path):
    raw = tmp_path / "nan.tsv"
    raw.write_text("u1\ti1\tnan\nu1\ti2\t5\n", encoding="utf-8")
    assert _run("prepare", "--data", raw, "--out", tmp_path / "out") == 3


def test_bad_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("DSIML_THREADS", "abc")
    assert _run("bench", "--m", 200, "--dim", 64, "--queries", 2) == 2
    assert capsys.readouterr().out == ""
    # an explicit flag overrides the environment
    assert _run("bench", "--m", 200, "--dim", 64, "--queries", 2, "--threads", 1) == 0


def test_train_eval_recommend_codes(setup_data, capsys):
    data = setup_data["data"]
    model = setup_data["tmp"] / "dsiml-model"
    assert _run("train", "--data", data, "--out", model, *HP) == 0
    assert _json_lines(capsys.readouterr().out)
    assert (model / "model.json").is_file()

    assert _run("eval", "--data", data, "--model", model, "--ks", 5, 10) == 0
    metrics = _json_lines(capsys.readouterr().out)
    assert [m["k"] for m in metrics] == [5, 10]
    assert all(m["model"] == "dsiml" for m in metrics)
    assert all(0.0 <= m["ndcg"] <= 1.0 for m in metrics)

    code = _run(
        "recommend", "--data", data, "--model", model, "--k", 3, "--users", "u0", "u5"
    )
    assert code == 0
    recs = _json_lines(capsys.readouterr().out)
    assert [r["user"] for r in recs] == ["u0", "u5"]
    assert all(len(r["items"]) == 3 for r in recs)
    assert all(r["distances"] == sorted(r["distances"]) for r in recs)
    train = (data / "train.tsv").read_text().splitlines()
    seen = {line.split("\t")[1] for line in train if line.startswith("u0\t")}
    assert not seen & set(recs[0]["items"])


def test_train_siml_and_recommend_all(setup_data, capsys):
    data = setup_data["data"]
    model = setup_data["tmp"] / "siml-model"
    assert _run("train", "--data", data, "--out", model, "--mode", "siml", *HP) == 0
    capsys.readouterr()
    assert _run("recommend", "--data", data, "--model", model) == 0
    recs = _json_lines(capsys.readouterr().out)
    assert len(recs) == 12
    # 15 items minus 7 train positives leaves 8 candidates
    assert all(len(r["items"]) == 8 for r in recs)


def test_usage_errors(setup_data):
    data = setup_data["data"]
    out = setup_data["tmp"] / "m"
    assert _run("train", "--data", data, "--out", out, "--gamma", 2.0) == 2
    assert _run("train", "--data", data, "--out", out, "--dim", 0) == 2
    assert _run("eval", "--data", data, "--model", out) == 2
    assert _run("grid", "--data", data, "--lambdas", 0) == 2
    assert _run("recommend", "--data", data, "--model", data, "--k", 0) == 2


def test_run_config():
    config = RunConfig.from_args(build_parser().parse_args(["bench", "--m", "10"]))
    assert config.hp.dim == 64
    assert config.m == 10
    # lambda = 0 disables the margin term outside of grid sweeps
    args = build_parser().parse_args(["rq4", "--lambda", "0", "--seeds", "0"])
    assert RunConfig.from_args(args).hp.lam == 0.0
    args = build_parser().parse_args(["rq4", "--gamma", "-1"])
    with pytest.raises(UsageError):
        RunConfig.from_args(args)


def test_mismatched_model(setup_data, capsys):
    tmp = setup_data["tmp"]
    model = tmp / "model"
    data = setup_data["data"]
    assert _run("train", "--data", data, "--out", model, "--mode", "siml", *HP) == 0
    other_raw = tmp / "other.tsv"
    _write_log(other_raw, n_users=12, n_items=20)
    other = tmp / "other"
    assert _run("prepare", "--data", other_raw, "--min-degree", 0, "--out", other) == 0
    capsys.readouterr()
    assert _run("eval", "--data", other, "--model", model) == 3
    assert capsys.readouterr().out == ""


def test_bench(capsys):
    assert _run("bench", "--m", 500, "--dim", 64, "--queries", 3) == 0
    record = _json_lines(capsys.readouterr().out)[0]
    assert set(record) >= {"m", "d", "hamming_qps", "float_qps", "speedup"}
    assert record["score_speedup"] > 0
    assert record["m"] == 500


def test_grid(setup_data, capsys):
    code = _run(
        "grid",
        "--data",
        setup_data["data"],
        "--mode",
        "siml",
        "--gammas",
        0.5,
        1.0,
        "--lambdas",
        1.0,
        "--seeds",
        0,
        "--ks",
        5,
        *HP,
    )
    assert code == 0
    rows = _json_lines(capsys.readouterr().out)
    assert [r["gamma"] for r in rows] == [0.5, 1.0]
    assert all(r["k"] == 5 for r in rows)
