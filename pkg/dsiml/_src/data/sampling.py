from dataclasses import dataclass, field
from typing import Iterator
import numpy as np
from .interactions import InteractionSet
from ..utils.errors import SamplingError


@dataclass(frozen=True)
class TripletBatch:
    """N-pair training batch.

    Row t holds one train positive users[t] -> positives[t] together with
    n_neg sampled negatives negatives[t, :]. Flattening yields
    len(users) * n_neg (user, positive, negative) triplets.
    """

    users: np.ndarray
    positives: np.ndarray
    negatives: np.ndarray
    _flat: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_neg(self) -> int:
        return self.negatives.shape[1]

    @property
    def n_triplets(self) -> int:
        return self.negatives.size

    def triplets(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Returns aligned flat (u, i, j) arrays, i the positive and j the
        negative item of each triplet."""
        if not self._flat:
            self._flat["u"] = np.repeat(self.users, self.n_neg)
            self._flat["i"] = np.repeat(self.positives, self.n_neg)
            self._flat["j"] = self.negatives.ravel()
        return self._flat["u"], self._flat["i"], self._flat["j"]

    def __len__(self) -> int:
        return self.n_triplets


def sample_negatives(
    positives: np.ndarray,
    n_items: int,
    size: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draws size distinct items uniformly from the complement of a sorted
    positive set.

    Parameters
    ----------
    positives : np.ndarray
        Sorted, unique positive item ids.

    n_items : int

    size : int

    rng : np.random.Generator

    Returns
    -------
    np.ndarray ~ (size,)
    """
    n_pool = n_items - len(positives)
    if n_pool < size:
        raise SamplingError(
            f"Only {n_pool} negative item(s) available, {size} requested."
        )
    draws = rng.choice(n_pool, size=size, replace=False)
    # map rank among negatives to item id
    shifted = positives - np.arange(len(positives))
    return draws + np.searchsorted(shifted, draws, side="right")


def sample_npair_batch(
    data: InteractionSet,
    user_ids: np.ndarray | None = None,
    n_neg: int = 5,
    seed: int | np.random.Generator = 0,
) -> TripletBatch:
    """Builds an N-pair batch: every train positive of every listed user is
    paired with n_neg distinct negatives drawn uniformly from the items that
    user never interacted with (test positives are not negatives).

    Parameters
    ----------
    data : InteractionSet

    user_ids : np.ndarray | None
        Default: None. Users to include. If None, all users.

    n_neg : int
        Default: 5. Must be >= 1.

    seed : int | np.random.Generator
        Default: 0. Identical seeds produce identical batches.

    Returns
    -------
    TripletBatch
    """
    if n_neg < 1:
        raise ValueError(f"Invalid input: n_neg = {n_neg}. Must be >= 1.")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if user_ids is None:
        user_ids = np.arange(data.n_users)
    user_ids = np.asarray(user_ids, dtype=np.int64)

    users, positives, negatives = [], [], []
    for u in user_ids:
        train = data.train_positives(u)
        all_pos = data.all_positives(u)
        if data.n_items - len(all_pos) < n_neg:
            raise SamplingError(
                f"User {u} has {data.n_items - len(all_pos)} negative item(s), "
                f"fewer than n_neg = {n_neg}."
            )
        users.append(np.full(len(train), u, dtype=np.int64))
        positives.append(train)
        negatives.append(
            np.stack(
                [sample_negatives(all_pos, data.n_items, n_neg, rng) for _ in train]
            )
        )
    if not users:
        empty = np.zeros(0, dtype=np.int64)
        return TripletBatch(empty, empty, np.zeros((0, n_neg), dtype=np.int64))
    return TripletBatch(
        np.concatenate(users),
        np.concatenate(positives).astype(np.int64),
        np.concatenate(negatives).astype(np.int64),
    )


def iter_user_batches(
    n_users: int, batch_users: int, rng: np.random.Generator
) -> Iterator[np.ndarray]:
    """Yields a random partition of the user ids into chunks of at most
    batch_users users."""
    if batch_users < 1:
        raise ValueError(f"Invalid input: batch_users = {batch_users}.")
    order = rng.permutation(n_users)
    for start in range(0, n_users, batch_users):
        yield order[start : start + batch_users]
