from pathlib import Path
from typing import Literal, Sequence
import numpy as np
import pandas as pd
from ..display.print_utils import print_wrapped, quote_and_color
from ..utils.errors import DataError, EmptyDatasetError, ParseError
from ..utils.helpers import group_indices


SPLIT_LABELS = ("train", "test")


class InteractionSet:
    """Deduplicated implicit feedback over dense user and item ids.

    Each (user, item) pair is tagged either 'train' or 'test'. Ids are
    assigned in first-appearance order at load time; the external keys are
    kept so every output can be mapped back to the input vocabulary.

    Instances are immutable after construction and can be shared freely.
    """

    def __init__(
        self,
        users: np.ndarray,
        items: np.ndarray,
        is_test: np.ndarray | None = None,
        user_keys: Sequence[str] | None = None,
        item_keys: Sequence[str] | None = None,
        n_items: int | None = None,
        name: str | None = None,
    ):
        """Initializes an InteractionSet.

        Parameters
        ----------
        users : np.ndarray ~ (n_pairs,)
            Dense user ids. Every id in [0, max + 1) must have at least one
            train-tagged interaction.

        items : np.ndarray ~ (n_pairs,)
            Item ids in [0, n_items).

        is_test : np.ndarray ~ (n_pairs,) | None
            Default: None. Boolean split tags. None tags everything 'train'.

        user_keys : Sequence[str] | None
            Default: None. External user keys indexed by user id. If None,
            the ids themselves (as strings) are used.

        item_keys : Sequence[str] | None
            Default: None. External item keys indexed by item id.

        n_items : int | None
            Default: None. Number of items. Inferred from item_keys, else
            from the largest item id.

        name : str | None
            Default: None. Name of the dataset, used in summaries.
        """
        users = np.asarray(users, dtype=np.int64)
        items = np.asarray(items, dtype=np.int64)
        if users.shape != items.shape or users.ndim != 1:
            raise ValueError("users and items must be 1-D arrays of equal length.")
        if len(users) == 0:
            raise EmptyDatasetError("An InteractionSet needs at least one pair.")
        if is_test is None:
            is_test = np.zeros(len(users), dtype=bool)
        is_test = np.asarray(is_test, dtype=bool)
        if is_test.shape != users.shape:
            raise ValueError("is_test must align with users and items.")

        n_users = int(users.max()) + 1
        if n_items is None:
            n_items = len(item_keys) if item_keys is not None else int(items.max()) + 1
        if users.min() < 0 or items.min() < 0 or items.max() >= n_items:
            raise DataError("User and item ids must be non-negative and in range.")

        df = pd.DataFrame({"user": users, "item": items, "is_test": is_test})
        if df.duplicated(subset=["user", "item"]).any():
            raise DataError("Duplicate (user, item) pairs are not allowed.")
        df = df.sort_values(["user", "item"], kind="stable").reset_index(drop=True)

        self._n_users = n_users
        self._n_items = int(n_items)
        self._users = df["user"].to_numpy()
        self._items = df["item"].to_numpy()
        self._is_test = df["is_test"].to_numpy()
        for arr in (self._users, self._items, self._is_test):
            arr.flags.writeable = False

        self._user_keys = self._resolve_keys(user_keys, n_users, "user")
        self._item_keys = self._resolve_keys(item_keys, self._n_items, "item")

        # per-user sorted positive lists
        groups = group_indices(self._users, n_users)
        self._all_pos = [self._items[g] for g in groups]
        self._train_pos = [self._items[g[~self._is_test[g]]] for g in groups]
        self._test_pos = [self._items[g[self._is_test[g]]] for g in groups]
        missing = [u for u in range(n_users) if len(self._train_pos[u]) == 0]
        if missing:
            raise DataError(
                f"{len(missing)} user(s) have no train-tagged positive, "
                f"e.g. user {missing[0]}."
            )

        self._name = "Unnamed Dataset" if name is None else name

    @staticmethod
    def _resolve_keys(keys, n: int, kind: str) -> np.ndarray:
        if keys is None:
            return np.array([str(i) for i in range(n)], dtype=object)
        keys = np.asarray(keys, dtype=object)
        if len(keys) != n:
            raise DataError(f"Expected {n} {kind} keys, received {len(keys)}.")
        return keys

    # --------------------------------------------------------------------------
    # GETTERS
    # --------------------------------------------------------------------------
    @property
    def n_users(self) -> int:
        return self._n_users

    @property
    def n_items(self) -> int:
        return self._n_items

    @property
    def n_interactions(self) -> int:
        return len(self._users)

    @property
    def name(self) -> str:
        return self._name

    @property
    def user_keys(self) -> np.ndarray:
        return self._user_keys

    @property
    def item_keys(self) -> np.ndarray:
        return self._item_keys

    def train_positives(self, user: int) -> np.ndarray:
        """Returns the sorted train-tagged positive items of a user."""
        return self._train_pos[user]

    def test_positives(self, user: int) -> np.ndarray:
        """Returns the sorted test-tagged positive items of a user."""
        return self._test_pos[user]

    def all_positives(self, user: int) -> np.ndarray:
        """Returns all sorted positive items of a user, train and test."""
        return self._all_pos[user]

    def pairs(
        self, split: Literal["train", "test", "all"] = "all"
    ) -> tuple[np.ndarray, np.ndarray]:
        """Returns aligned (users, items) arrays for one split.

        Parameters
        ----------
        split : Literal['train', 'test', 'all']
            Default: 'all'.

        Returns
        -------
        tuple[np.ndarray, np.ndarray]
        """
        if split == "all":
            mask = np.ones(len(self._users), dtype=bool)
        elif split == "train":
            mask = ~self._is_test
        elif split == "test":
            mask = self._is_test
        else:
            raise ValueError(f"Invalid input: split = {split}.")
        return self._users[mask], self._items[mask]

    def is_test(self) -> np.ndarray:
        """Returns the split tags aligned with pairs('all')."""
        return self._is_test

    def user_degrees(self) -> np.ndarray:
        return np.bincount(self._users, minlength=self._n_users)

    def item_degrees(self) -> np.ndarray:
        return np.bincount(self._items, minlength=self._n_items)

    def to_dataframe(self) -> pd.DataFrame:
        """Returns the interactions as a DataFrame with external keys."""
        return pd.DataFrame(
            {
                "user": self._users,
                "item": self._items,
                "user_key": self._user_keys[self._users],
                "item_key": self._item_keys[self._items],
                "split": np.where(self._is_test, "test", "train"),
            }
        )

    def with_split(self, is_test: np.ndarray) -> "InteractionSet":
        """Returns a copy with new split tags aligned with pairs('all')."""
        return InteractionSet(
            self._users,
            self._items,
            is_test,
            user_keys=self._user_keys,
            item_keys=self._item_keys,
            n_items=self._n_items,
            name=self._name,
        )

    def __len__(self) -> int:
        return self.n_interactions

    def __str__(self) -> str:
        n_test = int(self._is_test.sum())
        return (
            f"InteractionSet({self._name!r}: {self._n_users} users, "
            f"{self._n_items} items, {self.n_interactions - n_test} train / "
            f"{n_test} test positives)"
        )

    __repr__ = __str__


def _parse_interaction_file(
    path: Path | str, separator: str, rating_threshold: float | None
) -> tuple[list[str], list[str]]:
    """Parses an interaction file into aligned lists of external keys of
    retained (positive) lines."""
    if len(separator) != 1:
        raise ValueError(f"Invalid input: separator = {separator!r}. Must be 1 char.")
    user_keys, item_keys = [], []
    with open(path, "rb") as f:
        for line_number, raw in enumerate(f, start=1):
            try:
                line = raw.decode("utf-8").rstrip("\r\n")
            except UnicodeDecodeError:
                raise ParseError("line is not valid UTF-8.", line_number)
            if line.strip() == "" or line.startswith("#"):
                continue
            fields = line.split(separator)
            if len(fields) < 2:
                raise ParseError(
                    f"expected at least 2 fields separated by {separator!r}, "
                    f"found {len(fields)}.",
                    line_number,
                )
            user_key, item_key = fields[0].strip(), fields[1].strip()
            if user_key == "" or item_key == "":
                raise ParseError("empty user or item key.", line_number)
            if len(fields) >= 3 and fields[2].strip() != "":
                try:
                    rating = float(fields[2])
                except ValueError:
                    raise ParseError(
                        f"unparsable rating {fields[2].strip()!r}.", line_number
                    )
                if not np.isfinite(rating):
                    raise ParseError(
                        f"non-finite rating {fields[2].strip()!r}.", line_number
                    )
                if rating_threshold is not None and rating < rating_threshold:
                    continue
            user_keys.append(user_key)
            item_keys.append(item_key)
    return user_keys, item_keys


def _from_key_pairs(
    user_keys: list[str],
    item_keys: list[str],
    is_test: np.ndarray | None = None,
    name: str | None = None,
) -> InteractionSet:
    """Remaps external keys to dense ids in first-appearance order and drops
    duplicate pairs (the first occurrence wins)."""
    if len(user_keys) == 0:
        raise EmptyDatasetError("No positive interactions were found.")
    users, user_vocab = pd.factorize(pd.Series(user_keys, dtype=object), sort=False)
    items, item_vocab = pd.factorize(pd.Series(item_keys, dtype=object), sort=False)
    if is_test is None:
        is_test = np.zeros(len(users), dtype=bool)
    df = pd.DataFrame({"user": users, "item": items, "is_test": is_test})
    df = df.drop_duplicates(subset=["user", "item"], keep="first")
    return InteractionSet(
        df["user"].to_numpy(),
        df["item"].to_numpy(),
        df["is_test"].to_numpy(),
        user_keys=np.asarray(user_vocab, dtype=object),
        item_keys=np.asarray(item_vocab, dtype=object),
        name=name,
    )


def load_interactions(
    path: Path | str,
    separator: str = "\t",
    rating_threshold: float = 1.0,
    name: str | None = None,
    verbose: bool = False,
) -> InteractionSet:
    """Loads an interaction log and converts it into implicit feedback.

    Each non-empty line not starting with '#' holds a user key, an item key
    and an optional rating; extra fields are ignored. Lines whose rating is
    below rating_threshold are dropped, lines without a rating are kept.
    Keys are remapped to dense ids in first-appearance order among the kept
    lines; duplicate pairs collapse to one positive.

    Parameters
    ----------
    path : Path | str
        UTF-8 text file.

    separator : str
        Default: tab. Single field separator character.

    rating_threshold : float
        Default: 1.0. Ratings >= rating_threshold become positives.

    name : str | None
        Default: None. Dataset name. If None, the file stem is used.

    verbose : bool
        Default: False. If True, prints a summary.

    Returns
    -------
    InteractionSet
    """
    user_keys, item_keys = _parse_interaction_file(path, separator, rating_threshold)
    out = _from_key_pairs(
        user_keys, item_keys, name=Path(path).stem if name is None else name
    )
    if verbose:
        print_wrapped(
            f"Loaded {quote_and_color(out.name, 'yellow')}: {out.n_users} users, "
            f"{out.n_items} items, {out.n_interactions} positives.",
            type="UPDATE",
        )
    return out


def load_split(
    train_path: Path | str,
    test_path: Path | str,
    separator: str = "\t",
    name: str | None = None,
) -> InteractionSet:
    """Reloads a train/test pair of interaction files into one tagged
    InteractionSet. Keys are assigned in first-appearance order over the
    train file, then the test file.

    Parameters
    ----------
    train_path : Path | str

    test_path : Path | str

    separator : str
        Default: tab.

    name : str | None
        Default: None.

    Returns
    -------
    InteractionSet
    """
    train_users, train_items = _parse_interaction_file(train_path, separator, None)
    test_users, test_items = _parse_interaction_file(test_path, separator, None)
    is_test = np.concatenate(
        [np.zeros(len(train_users), dtype=bool), np.ones(len(test_users), dtype=bool)]
    )
    return _from_key_pairs(
        train_users + test_users,
        train_items + test_items,
        is_test=is_test,
        name=Path(train_path).parent.name if name is None else name,
    )


def write_interactions(
    data: InteractionSet,
    path: Path | str,
    split: Literal["train", "test", "all"] = "all",
    separator: str = "\t",
) -> None:
    """Writes one split in the interaction text format
    (user_key<sep>item_key<sep>1), ordered by user id then item id."""
    users, items = data.pairs(split)
    with open(path, "w", encoding="utf-8") as f:
        for u, i in zip(users, items):
            f.write(f"{data.user_keys[u]}{separator}{data.item_keys[i]}{separator}1\n")


def filter_min_degree(
    data: InteractionSet, min_count: int, verbose: bool = False
) -> InteractionSet:
    """Iteratively removes users and items with fewer than min_count
    interactions (train and test counted together) until no entity falls
    below the threshold. Surviving ids are re-densified in their original
    order, so the output of a second call equals its input.

    Parameters
    ----------
    data : InteractionSet

    min_count : int
        Must be >= 1.

    verbose : bool
        Default: False.

    Returns
    -------
    InteractionSet
    """
    if min_count < 1:
        raise ValueError(f"Invalid input: min_count = {min_count}. Must be >= 1.")

    users, items = data.pairs("all")
    is_test = data.is_test()
    keep = np.ones(len(users), dtype=bool)
    n_rounds = 0
    while True:
        n_rounds += 1
        user_deg = np.bincount(users[keep], minlength=data.n_users)
        item_deg = np.bincount(items[keep], minlength=data.n_items)
        new_keep = (
            keep & (user_deg[users] >= min_count) & (item_deg[items] >= min_count)
        )
        if new_keep.sum() == keep.sum():
            break
        keep = new_keep
        if not keep.any():
            raise EmptyDatasetError(
                f"Filtering with min_count = {min_count} removed all interactions."
            )

    kept_users, user_ids = np.unique(users[keep], return_inverse=True)
    kept_items, item_ids = np.unique(items[keep], return_inverse=True)
    out = InteractionSet(
        user_ids,
        item_ids,
        is_test[keep],
        user_keys=data.user_keys[kept_users],
        item_keys=data.item_keys[kept_items],
        n_items=len(kept_items),
        name=data.name,
    )
    if verbose:
        print_wrapped(
            f"Degree filter (min {min_count}) converged after {n_rounds} round(s): "
            f"{out.n_users}/{data.n_users} users, {out.n_items}/{data.n_items} items "
            "retained.",
            type="UPDATE",
        )
    return out


def split_train_test(
    data: InteractionSet, train_fraction: float = 0.8, seed: int = 42
) -> InteractionSet:
    """Randomly splits each user's positives into train and test.

    A user with n positives gets floor(n * (1 - train_fraction)) test
    positives, capped at n - 1 so at least one positive stays in train.
    Existing tags are ignored; the split is redrawn from all positives.

    Parameters
    ----------
    data : InteractionSet

    train_fraction : float
        Default: 0.8. Must lie in (0, 1).

    seed : int
        Default: 42.

    Returns
    -------
    InteractionSet
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(
            f"Invalid input: train_fraction = {train_fraction}. Must be in (0, 1)."
        )
    rng = np.random.default_rng(seed)
    users, _ = data.pairs("all")
    is_test = np.zeros(len(users), dtype=bool)
    # pairs are sorted by (user, item), so each user's rows are contiguous
    starts = np.searchsorted(users, np.arange(data.n_users), side="left")
    for u in range(data.n_users):
        n = len(data.all_positives(u))
        n_test = min(int(np.floor(n * (1.0 - train_fraction) + 1e-9)), n - 1)
        perm = rng.permutation(n)
        is_test[starts[u] + perm[:n_test]] = True
    return data.with_split(is_test)
