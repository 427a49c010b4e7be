import numpy as np


def group_indices(keys: np.ndarray, n_groups: int) -> list[np.ndarray]:
    """Groups positions of `keys` by key value.

    Parameters
    ----------
    keys : np.ndarray ~ (n,)
        Integer keys in [0, n_groups).

    n_groups : int

    Returns
    -------
    list[np.ndarray]
        Element g holds the (ascending) positions where keys == g.
    """
    keys = np.asarray(keys, dtype=np.int64)
    order = np.argsort(keys, kind="stable")
    bounds = np.searchsorted(keys[order], np.arange(n_groups + 1), side="left")
    return [order[bounds[g] : bounds[g + 1]] for g in range(n_groups)]


def derive_seed(*entropy: int) -> np.random.Generator:
    """Returns a Generator seeded by a tuple of integers, so that streams for
    (run seed, iteration, entity) are reproducible independently of the order
    in which workers consume them."""
    return np.random.default_rng(np.random.SeedSequence([int(e) for e in entropy]))
