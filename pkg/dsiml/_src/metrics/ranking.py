from concurrent.futures import ThreadPoolExecutor
from typing import Literal, Sequence
import numpy as np
import pandas as pd
from ..codes.binary import BinaryCodeMatrix
from ..codes.embedding import EmbeddingMatrix
from ..data.interactions import InteractionSet
from ..display.compute_options import compute_options
from ..display.print_utils import (
    bold_text,
    color_text,
    format_two_column,
    format_value,
    framed,
    print_wrapped,
)
from ..retrieval.index import RetrievalIndex, top_k
from ..utils.errors import DimensionMismatchError
from ..utils.serialize import to_json_line


def _discounts(n: int) -> np.ndarray:
    return 1.0 / np.log2(np.arange(2, n + 2))


def ndcg_at_k(ranked: Sequence[int], test_positives, k: int) -> float:
    """Binary-relevance NDCG@k with a log2(rank + 1) discount, normalized by
    the ideal ranking of min(k, |positives|) hits. 0 without positives."""
    if k < 1:
        raise ValueError(f"Invalid input: k = {k}. Must be >= 1.")
    positives = np.asarray(list(test_positives))
    if len(positives) == 0:
        return 0.0
    head = np.asarray(ranked)[:k]
    hits = np.isin(head, positives)
    dcg = float(np.sum(_discounts(len(head))[hits]))
    idcg = float(np.sum(_discounts(min(k, len(positives)))))
    return dcg / idcg


def hr_at_k(ranked: Sequence[int], test_positives, k: int) -> float:
    """Fraction of the test positives found in the top k (recall@k)."""
    if k < 1:
        raise ValueError(f"Invalid input: k = {k}. Must be >= 1.")
    positives = np.asarray(list(test_positives))
    if len(positives) == 0:
        return 0.0
    head = np.asarray(ranked)[:k]
    return float(np.isin(positives, head).sum() / len(positives))


class RankingMetrics:
    """Per-k NDCG and HR averaged over the evaluated users."""

    def __init__(self, ndcg: dict[int, float], hr: dict[int, float], n_users: int):
        self._ndcg = {int(k): float(v) for k, v in ndcg.items()}
        self._hr = {int(k): float(v) for k, v in hr.items()}
        self._n_users = int(n_users)

    @property
    def ks(self) -> list[int]:
        return sorted(self._ndcg)

    @property
    def ndcg(self) -> dict[int, float]:
        return dict(self._ndcg)

    @property
    def hr(self) -> dict[int, float]:
        return dict(self._hr)

    @property
    def n_users_evaluated(self) -> int:
        return self._n_users

    def to_dataframe(self) -> pd.DataFrame:
        """One row per k with columns 'k', 'ndcg', 'hr', 'users'."""
        return pd.DataFrame(
            {
                "k": self.ks,
                "ndcg": [self._ndcg[k] for k in self.ks],
                "hr": [self._hr[k] for k in self.ks],
                "users": self._n_users,
            }
        )

    def to_records(self, model: str, seed: int | None = None, **extra) -> list[dict]:
        return [
            {
                "model": model,
                **extra,
                "k": k,
                "ndcg": self._ndcg[k],
                "hr": self._hr[k],
                "users": self._n_users,
                "seed": seed,
            }
            for k in self.ks
        ]

    def to_json_lines(self, model: str, seed: int | None = None, **extra) -> list[str]:
        """One JSON line per k:
        {"model", "k", "ndcg", "hr", "users", "seed"} plus any extra fields."""
        return [to_json_line(r) for r in self.to_records(model, seed, **extra)]

    def __str__(self) -> str:
        body = [bold_text("Users evaluated: ") + str(self._n_users)]
        for k in self.ks:
            body.append(
                format_two_column(
                    bold_text(f"NDCG@{k}: ")
                    + color_text(format_value(self._ndcg[k]), "yellow"),
                    bold_text(f"HR@{k}: ")
                    + color_text(format_value(self._hr[k]), "yellow"),
                )
            )
        return framed("Ranking Metrics", body)

    def _repr_pretty_(self, p, cycle):
        if cycle:
            p.text(self.__class__.__name__ + "(...)")
        else:
            p.text(str(self))


def _embedding_ranker(U: np.ndarray, V: np.ndarray, data, metric: str, depth: int):
    def rank(u: int) -> np.ndarray:
        if metric == "inner":
            scores = V @ U[u]
        else:
            diff = V - U[u]
            scores = -np.einsum("mk,mk->m", diff, diff)
        scores[data.train_positives(u)] = -np.inf
        n_available = len(scores) - len(data.train_positives(u))
        order = np.argsort(-scores, kind="stable")
        return order[: min(depth, n_available)]

    return rank


def evaluate_model(
    user_repr,
    item_repr,
    data: InteractionSet,
    ks: Sequence[int] = (10,),
    metric: Literal["hamming", "inner", "euclidean"] | None = None,
    verbose: bool = False,
) -> RankingMetrics:
    """Ranks all items for every user with at least one test positive,
    skipping the user's train positives, and averages NDCG@k and HR@k.

    Parameters
    ----------
    user_repr, item_repr : BinaryCodeMatrix | EmbeddingMatrix
        Codes are ranked by Hamming distance; embeddings by inner product or
        Euclidean distance.

    data : InteractionSet

    ks : Sequence[int]
        Default: (10,).

    metric : Literal['hamming', 'inner', 'euclidean'] | None
        Default: None. None means 'hamming' for codes, 'inner' for
        embeddings.

    verbose : bool
        Default: False.

    Returns
    -------
    RankingMetrics
    """
    ks = sorted({int(k) for k in ks})
    if not ks or ks[0] < 1:
        raise ValueError(f"Invalid input: ks = {ks}. Every k must be >= 1.")
    if user_repr.rows != data.n_users or item_repr.rows != data.n_items:
        raise DimensionMismatchError(
            f"Model covers {user_repr.rows} users / {item_repr.rows} items, data has "
            f"{data.n_users} / {data.n_items}."
        )
    if user_repr.dim != item_repr.dim:
        raise DimensionMismatchError(
            f"User dim {user_repr.dim} differs from item dim {item_repr.dim}."
        )
    depth = ks[-1]

    if isinstance(user_repr, BinaryCodeMatrix):
        if metric not in (None, "hamming"):
            raise ValueError(f"Invalid input: metric = {metric} for binary codes.")
        index = RetrievalIndex.build(item_repr, data)

        def rank(u: int) -> np.ndarray:
            return np.array(
                [i for i, _ in top_k(index, user_repr.row(u), depth, exclude_user=u)],
                dtype=np.int64,
            )

    elif isinstance(user_repr, EmbeddingMatrix):
        metric = "inner" if metric is None else metric
        if metric not in ("inner", "euclidean"):
            raise ValueError(f"Invalid input: metric = {metric} for embeddings.")
        rank = _embedding_ranker(
            user_repr.values, item_repr.values, data, metric, depth
        )
    else:
        raise TypeError("user_repr must be a BinaryCodeMatrix or EmbeddingMatrix.")

    users = [u for u in range(data.n_users) if len(data.test_positives(u)) > 0]

    def score(u: int) -> tuple[list[float], list[float]]:
        ranked = rank(u)
        positives = data.test_positives(u)
        return (
            [ndcg_at_k(ranked, positives, k) for k in ks],
            [hr_at_k(ranked, positives, k) for k in ks],
        )

    n_threads = compute_options.n_threads
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            scores = list(pool.map(score, users))
    else:
        scores = [score(u) for u in users]

    if users:
        ndcg = np.mean([s[0] for s in scores], axis=0)
        hr = np.mean([s[1] for s in scores], axis=0)
    else:
        ndcg = hr = np.zeros(len(ks))
    out = RankingMetrics(dict(zip(ks, ndcg)), dict(zip(ks, hr)), len(users))
    if verbose:
        print_wrapped(
            f"Evaluated {len(users)} user(s): "
            + ", ".join(
                f"NDCG@{k} {format_value(out.ndcg[k])} / "
                f"HR@{k} {format_value(out.hr[k])}"
                for k in ks
            )
            + ".",
            type="UPDATE",
        )
    return out
