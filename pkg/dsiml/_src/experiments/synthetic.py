from dataclasses import dataclass
import numpy as np
from ..data.interactions import InteractionSet, split_train_test
from ..display.print_utils import print_wrapped
from ..utils.errors import DataError


MAJOR, MINOR = 0, 1


@dataclass(frozen=True)
class SyntheticGeometry:
    """Latent layout behind a synthetic dataset.

    Items 0..n_major-1 belong to the major cluster, the remaining n_minor to
    the minor cluster.
    """

    centers: np.ndarray
    spreads: np.ndarray
    item_points: np.ndarray
    item_cluster: np.ndarray
    user_points: np.ndarray
    user_cluster: np.ndarray
    radius_factor: float
    attempts: int


def generate_imbalanced_synthetic(
    n_users: int = 200,
    n_major: int = 400,
    n_minor: int = 40,
    spread_major: float = 3.0,
    spread_minor: float = 0.5,
    seed: int = 0,
    latent_dim: int = 2,
    separation: float = 10.0,
    radius_factor: float = 1.0,
    minor_user_fraction: float = 0.5,
    train_fraction: float = 0.8,
    max_attempts: int = 20,
    allow_equal_spreads: bool = False,
) -> tuple[InteractionSet, SyntheticGeometry]:
    """Plants two item clusters of unequal size and spread, places each user
    inside one cluster, and makes a user like every item of its cluster
    within radius_factor * spread of the user's point. Intra-class variation
    differs between the clusters, so no single fixed margin suits both.

    A draw in which some user likes nothing is rejected and redrawn from the
    same stream, up to max_attempts times.

    Parameters
    ----------
    n_users : int
        Default: 200.

    n_major, n_minor : int
        Default: 400, 40. Items per cluster; n_major > n_minor >= 1.

    spread_major, spread_minor : float
        Default: 3.0, 0.5. Per-cluster standard deviations;
        spread_major > spread_minor > 0.

    seed : int
        Default: 0.

    latent_dim : int
        Default: 2.

    separation : float
        Default: 10.0. Distance between the two cluster centers.

    radius_factor : float
        Default: 1.0. Liking radius in units of the cluster spread.

    minor_user_fraction : float
        Default: 0.5. Probability that a user lives in the minor cluster.

    train_fraction : float
        Default: 0.8. Per-user train share of the split.

    max_attempts : int
        Default: 20.

    allow_equal_spreads : bool
        Default: False. Permits spread_minor == spread_major for balanced
        control runs.

    Returns
    -------
    tuple[InteractionSet, SyntheticGeometry]
    """
    if not n_major > n_minor >= 1:
        raise ValueError(
            f"Invalid input: n_major = {n_major}, n_minor = {n_minor}. "
            "Need n_major > n_minor >= 1."
        )
    if not spread_minor > 0:
        raise ValueError(f"Invalid input: spread_minor = {spread_minor}.")
    if spread_major < spread_minor or (
        spread_major == spread_minor and not allow_equal_spreads
    ):
        raise ValueError(
            f"Invalid input: spread_major = {spread_major} must exceed "
            f"spread_minor = {spread_minor}."
        )
    if n_users < 1:
        raise ValueError(f"Invalid input: n_users = {n_users}.")

    rng = np.random.default_rng(seed)
    centers = np.zeros((2, latent_dim))
    centers[MINOR, 0] = separation
    spreads = np.array([spread_major, spread_minor])
    item_cluster = np.concatenate(
        [np.full(n_major, MAJOR), np.full(n_minor, MINOR)]
    ).astype(np.int64)

    for attempt in range(1, max_attempts + 1):
        item_points = centers[item_cluster] + spreads[item_cluster, None] * rng.normal(
            size=(len(item_cluster), latent_dim)
        )
        user_cluster = (rng.random(n_users) < minor_user_fraction).astype(np.int64)
        user_points = centers[user_cluster] + spreads[user_cluster, None] * rng.normal(
            size=(n_users, latent_dim)
        )
        dist = np.linalg.norm(user_points[:, None, :] - item_points[None, :, :], axis=2)
        likes = (item_cluster[None, :] == user_cluster[:, None]) & (
            dist <= radius_factor * spreads[user_cluster, None]
        )
        if np.all(likes.any(axis=1)):
            break
    else:
        raise DataError(
            f"Every one of {max_attempts} synthetic draws left a user without "
            "positives."
        )

    users, items = np.nonzero(likes)
    data = InteractionSet(
        users,
        items,
        user_keys=[f"u{u}" for u in range(n_users)],
        item_keys=[f"i{i}" for i in range(len(item_cluster))],
        n_items=len(item_cluster),
        name=f"synthetic-{seed}",
    )
    data = split_train_test(data, train_fraction, seed)
    if attempt > 1:
        print_wrapped(
            f"Synthetic draw accepted after {attempt} attempts.",
            type="NOTE",
            level="DEBUG",
        )
    geometry = SyntheticGeometry(
        centers=centers,
        spreads=spreads,
        item_points=item_points,
        item_cluster=item_cluster,
        user_points=user_points,
        user_cluster=user_cluster,
        radius_factor=radius_factor,
        attempts=attempt,
    )
    return data, geometry
