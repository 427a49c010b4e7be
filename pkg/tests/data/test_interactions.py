import sys
import pathlib
import numpy as np
import pytest

parent_dir = pathlib.Path(__file__).resolve().parent.parent.parent
sys.path.append(str(parent_dir))


from dsiml._src.data import (
    InteractionSet,
    load_interactions,
    load_split,
    write_interactions,
    filter_min_degree,
    split_train_test,
)
from dsiml._src.utils.errors import DataError, EmptyDatasetError, ParseError


@pytest.fixture
def setup_data(tmp_path):
    path = tmp_path / "ratings.tsv"
    path.write_text(
        "# user\titem\trating\n"
        "alice\tbook\t5\n"
        "bob\tbook\t4\n"
        "\n"
        "alice\tfilm\t3\textra\n"
        "bob\tfilm\t0.5\n"
        "alice\tbook\t2\n",
        encoding="utf-8",
    )
    return {"path": path, "tmp": tmp_path}


def _dense_set(n_users: int, n_items: int, per_user: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    users, items = [], []
    for u in range(n_users):
        chosen = rng.choice(n_items, size=per_user, replace=False)
        users.extend([u] * per_user)
        items.extend(chosen.tolist())
    return InteractionSet(np.array(users), np.array(items), n_items=n_items)


def test_load_counts_and_threshold(setup_data):
    data = load_interactions(setup_data["path"], rating_threshold=1.0)
    assert data.n_users == 2
    assert data.n_items == 2
    # bob/film is below threshold, alice/book appears twice
    assert data.n_interactions == 3
    assert list(data.user_keys) == ["alice", "bob"]
    assert list(data.item_keys) == ["book", "film"]
    assert data.name == "ratings"


def test_load_first_appearance_ids(tmp_path):
    path = tmp_path / "log.csv"
    path.write_text("z,y\nz,x\na,x\n", encoding="utf-8")
    data = load_interactions(path, separator=",")
    assert list(data.user_keys) == ["z", "a"]
    assert list(data.item_keys) == ["y", "x"]
    np.testing.assert_array_equal(data.train_positives(0), [0, 1])
    np.testing.assert_array_equal(data.train_positives(1), [1])


def test_load_errors(tmp_path):
    bad = tmp_path / "bad.tsv"
    bad.write_text("u1\ti1\t1\nonlyonefield\n", encoding="utf-8")
    with pytest.raises(ParseError) as info:
        load_interactions(bad)
    assert info.value.line_number == 2

    rating = tmp_path / "rating.tsv"
    rating.write_text("u1\ti1\tfive\n", encoding="utf-8")
    with pytest.raises(ParseError):
        load_interactions(rating)

    empty = tmp_path / "empty.tsv"
    empty.write_text("u1\ti1\t0\n# nothing\n", encoding="utf-8")
    with pytest.raises(EmptyDatasetError):
        load_interactions(empty)


def test_load_rejects_undecodable_line(tmp_path):
    path = tmp_path / "latin.tsv"
    path.write_bytes(b"u1\ti1\t5\nu2\t\xff\xfe\t5\n")
    with pytest.raises(ParseError) as info:
        load_interactions(path)
    assert info.value.line_number == 2


@pytest.mark.parametrize("value", ["nan", "inf", "-inf", "NaN"])
def test_load_rejects_non_finite_rating(tmp_path, value):
    path = tmp_path / "ratings.tsv"
    path.write_text(f"u1\ti2\t5\nu1\ti1\t{value}\n", encoding="utf-8")
    with pytest.raises(ParseError) as info:
        load_interactions(path, rating_threshold=4.0)
    assert info.value.line_number == 2


def test_load_crlf_lines(tmp_path):
    path = tmp_path / "crlf.tsv"
    path.write_bytes(b"u1\ti1\t5\r\nu1\ti2\t5\r\n")
    data = load_interactions(path)
    assert list(data.item_keys) == ["i1", "i2"]


def test_interaction_set_validation():
    with pytest.raises(DataError):
        InteractionSet(np.array([0, 0]), np.array([1, 1]))
    # user 1 has only a test positive
    with pytest.raises(DataError):
        InteractionSet(np.array([0, 1]), np.array([0, 1]), np.array([False, True]))


def test_filter_removes_sparse_user():
    users, items = [], []
    for u in range(21):
        users.extend([u] * 20)
        items.extend(range(20))
    users.extend([21] * 19)
    items.extend(range(19))
    data = InteractionSet(np.array(users), np.array(items), n_items=20)
    out = filter_min_degree(data, 20)
    assert out.n_users == 21
    assert out.n_items == 20
    assert "21" not in set(out.user_keys)


def test_filter_untouched_when_dense():
    data = InteractionSet(
        np.repeat(np.arange(3), 3), np.tile(np.arange(3), 3), name="dense"
    )
    out = filter_min_degree(data, 3)
    np.testing.assert_array_equal(out.pairs()[0], data.pairs()[0])
    np.testing.assert_array_equal(out.pairs()[1], data.pairs()[1])
    np.testing.assert_array_equal(out.user_degrees(), [3, 3, 3])
    np.testing.assert_array_equal(out.item_degrees(), [3, 3, 3])


def test_filter_chain_and_fixed_point():
    # users 0-2 hold items {0, 1, 2}; user 3 is sparse and its removal drops
    # item 3 below the threshold
    pairs = [(u, i) for u in range(3) for i in range(3)]
    pairs += [(3, 0), (3, 3)]
    pairs += [(u, i) for u in (4, 5) for i in range(4)]
    users = np.array([p[0] for p in pairs])
    items = np.array([p[1] for p in pairs])
    data = InteractionSet(users, items)
    out = filter_min_degree(data, 3)

    # single-pass filtering repeated until no change
    keep = np.ones(len(users), dtype=bool)
    while True:
        ud = np.bincount(users[keep], minlength=6)
        idg = np.bincount(items[keep], minlength=4)
        new = keep & (ud[users] >= 3) & (idg[items] >= 3)
        if new.sum() == keep.sum():
            break
        keep = new
    assert out.n_interactions == keep.sum()
    assert out.n_users == 5
    assert out.n_items == 3
    assert list(out.user_keys) == ["0", "1", "2", "4", "5"]

    again = filter_min_degree(out, 3)
    np.testing.assert_array_equal(again.pairs()[0], out.pairs()[0])
    np.testing.assert_array_equal(again.pairs()[1], out.pairs()[1])
    assert list(again.user_keys) == list(out.user_keys)


def test_filter_everything_removed():
    data = InteractionSet(np.array([0, 1]), np.array([0, 1]))
    with pytest.raises(EmptyDatasetError):
        filter_min_degree(data, 5)


def test_split_counts_and_determinism():
    users = [0] * 10 + [1]
    items = list(range(10)) + [3]
    data = InteractionSet(np.array(users), np.array(items))
    split = split_train_test(data, 0.8, seed=7)
    assert len(split.train_positives(0)) == 8
    assert len(split.test_positives(0)) == 2
    assert len(split.train_positives(1)) == 1
    assert len(split.test_positives(1)) == 0

    again = split_train_test(data, 0.8, seed=7)
    np.testing.assert_array_equal(split.is_test(), again.is_test())

    for u in range(split.n_users):
        train, test = split.train_positives(u), split.test_positives(u)
        assert len(np.intersect1d(train, test)) == 0
        np.testing.assert_array_equal(
            np.union1d(train, test), split.all_positives(u)
        )

    with pytest.raises(ValueError):
        split_train_test(data, 1.0)


def test_write_and_reload(setup_data):
    data = split_train_test(_dense_set(6, 15, 10, seed=3), 0.8, seed=1)
    tmp = setup_data["tmp"]
    write_interactions(data, tmp / "train.tsv", "train")
    write_interactions(data, tmp / "test.tsv", "test")
    reloaded = load_split(tmp / "train.tsv", tmp / "test.tsv")
    assert reloaded.n_users == data.n_users
    assert reloaded.n_interactions == data.n_interactions
    for u in range(data.n_users):
        key = data.user_keys[u]
        v = list(reloaded.user_keys).index(key)
        assert sorted(reloaded.item_keys[reloaded.test_positives(v)]) == sorted(
            data.item_keys[data.test_positives(u)]
        )
