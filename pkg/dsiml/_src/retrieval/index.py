import numpy as np
from ..codes.binary import BinaryCodeMatrix
from ..data.interactions import InteractionSet
from ..utils.errors import DimensionMismatchError


def _query_words(index: "RetrievalIndex", b_u) -> np.ndarray:
    if isinstance(b_u, BinaryCodeMatrix):
        if b_u.rows != 1:
            raise ValueError(f"Invalid input: query has {b_u.rows} rows, expected 1.")
        query = b_u
    else:
        query = BinaryCodeMatrix.from_signs(np.asarray(b_u).ravel())
    if query.dim != index.dim:
        raise DimensionMismatchError(
            f"Query dim {query.dim} differs from index dim {index.dim}."
        )
    return query.words[0]


class RetrievalIndex:
    """Linear-scan Hamming index over packed item codes.

    Distances are xor/popcount over whole words. Rankings break distance
    ties by ascending item id.
    """

    def __init__(
        self,
        item_codes: BinaryCodeMatrix,
        excluded: list[np.ndarray] | None = None,
    ):
        """Initializes a RetrievalIndex.

        Parameters
        ----------
        item_codes : BinaryCodeMatrix

        excluded : list[np.ndarray] | None
            Default: None. Element u lists the item ids never returned to
            user u (typically the user's train positives).
        """
        self._codes = item_codes
        if excluded is not None:
            excluded = [np.asarray(e, dtype=np.int64) for e in excluded]
            for e in excluded:
                if len(e) and (e.min() < 0 or e.max() >= item_codes.rows):
                    raise ValueError("Excluded item ids must reference indexed items.")
        self._excluded = excluded

    @classmethod
    def build(
        cls, item_codes: BinaryCodeMatrix, data: InteractionSet | None = None
    ) -> "RetrievalIndex":
        """Builds an index; when data is given each user's train positives are
        excluded from that user's results."""
        excluded = None
        if data is not None:
            if data.n_items != item_codes.rows:
                raise DimensionMismatchError(
                    f"Index has {item_codes.rows} items, data has {data.n_items}."
                )
            excluded = [data.train_positives(u) for u in range(data.n_users)]
        return cls(item_codes, excluded)

    @property
    def n_items(self) -> int:
        return self._codes.rows

    @property
    def dim(self) -> int:
        return self._codes.dim

    @property
    def item_codes(self) -> BinaryCodeMatrix:
        return self._codes

    def excluded(self, user: int | None) -> np.ndarray:
        if user is None or self._excluded is None:
            return np.zeros(0, dtype=np.int64)
        return self._excluded[user]

    def distances(self, b_u) -> np.ndarray:
        """Hamming distances from b_u to every indexed item."""
        q = _query_words(self, b_u)
        return np.bitwise_count(self._codes.words ^ q).sum(axis=1, dtype=np.int64)


def _ranked(
    index: RetrievalIndex, b_u, k: int | None, exclude_user: int | None
) -> tuple[np.ndarray, np.ndarray]:
    dist = index.distances(b_u)
    m = index.n_items
    # unique keys: distance first, then item id
    keys = dist * m + np.arange(m, dtype=np.int64)
    excluded = index.excluded(exclude_user)
    if len(excluded):
        keys[excluded] = np.iinfo(np.int64).max
    n_available = m - len(np.unique(excluded))
    n_out = n_available if k is None else min(k, n_available)
    if n_out < m:
        if n_out > 0:
            top = np.argpartition(keys, n_out - 1)[:n_out]
        else:
            top = np.zeros(0, dtype=np.int64)
    else:
        top = np.arange(m)
    top = top[np.argsort(keys[top], kind="stable")]
    return top, dist[top]


def top_k(
    index: RetrievalIndex, b_u, k: int, exclude_user: int | None = None
) -> list[tuple[int, int]]:
    """The k items nearest to b_u in Hamming distance.

    Parameters
    ----------
    index : RetrievalIndex

    b_u : BinaryCodeMatrix | np.ndarray
        One query code (one-row matrix or +/-1 vector).

    k : int
        Must be >= 1. When fewer candidates remain, all are returned.

    exclude_user : int | None
        Default: None. If given, that user's excluded items are skipped.

    Returns
    -------
    list[tuple[int, int]]
        (item id, distance) pairs by ascending distance, then item id.
    """
    if k < 1:
        raise ValueError(f"Invalid input: k = {k}. Must be >= 1.")
    ids, dist = _ranked(index, b_u, k, exclude_user)
    return [(int(i), int(h)) for i, h in zip(ids, dist)]


def rank_all(
    index: RetrievalIndex, b_u, exclude_user: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Full ranking of all non-excluded items.

    Returns
    -------
    tuple[np.ndarray, np.ndarray]
        Item ids and their distances, best first.
    """
    return _ranked(index, b_u, None, exclude_user)


def top_k_batch(
    index: RetrievalIndex,
    user_codes: BinaryCodeMatrix,
    users: np.ndarray,
    k: int,
    exclude: bool = True,
) -> list[np.ndarray]:
    """top_k item ids for several users.

    Parameters
    ----------
    index : RetrievalIndex

    user_codes : BinaryCodeMatrix
        Codes of all users.

    users : np.ndarray
        User ids to query.

    k : int

    exclude : bool
        Default: True. Skip each user's excluded items.

    Returns
    -------
    list[np.ndarray]
        One array of item ids per user, best first.
    """
    if k < 1:
        raise ValueError(f"Invalid input: k = {k}. Must be >= 1.")
    return [
        _ranked(index, user_codes.row(int(u)), k, int(u) if exclude else None)[0]
        for u in users
    ]
