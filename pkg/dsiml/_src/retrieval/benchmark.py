import time
import numpy as np
from threadpoolctl import threadpool_limits
from ..codes.binary import BinaryCodeMatrix
from ..display.print_utils import (
    bold_text,
    color_text,
    format_two_column,
    framed,
    print_wrapped,
)
from ..utils.serialize import to_json_line


def hamming_scores(
    item_words: np.ndarray, query_words: np.ndarray, dim: int
) -> np.ndarray:
    """Hamming distances from one packed query to every item."""
    return np.bitwise_count(item_words ^ query_words).sum(
        axis=1, dtype=np.uint8 if dim < 256 else np.uint16
    )


def hamming_rank(
    item_words: np.ndarray, query_words: np.ndarray, dim: int
) -> np.ndarray:
    """Full ranking by Hamming distance over packed words, ties by item id.
    Distances fit in 8 or 16 bits, so the stable sort is a radix sort."""
    return np.argsort(hamming_scores(item_words, query_words, dim), kind="stable")


def float_scores(item_vectors: np.ndarray, query: np.ndarray) -> np.ndarray:
    return item_vectors @ query


def float_rank(item_vectors: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Full ranking by single-precision inner product, ties by item id.
    Float keys go through a comparison sort."""
    return np.argsort(-float_scores(item_vectors, query), kind="stable")


class BenchmarkReport:
    """Throughput of packed-Hamming versus float dot-product full ranking."""

    def __init__(
        self,
        m: int,
        d: int,
        n_queries: int,
        hamming_seconds: float,
        float_seconds: float,
        hamming_score_seconds: float,
        float_score_seconds: float,
    ):
        self._m = m
        self._d = d
        self._n_queries = n_queries
        self._hamming_seconds = hamming_seconds
        self._float_seconds = float_seconds
        self._hamming_score_seconds = hamming_score_seconds
        self._float_score_seconds = float_score_seconds

    @property
    def hamming_qps(self) -> float:
        return self._n_queries / max(self._hamming_seconds, 1e-12)

    @property
    def float_qps(self) -> float:
        return self._n_queries / max(self._float_seconds, 1e-12)

    @property
    def speedup(self) -> float:
        return self.hamming_qps / self.float_qps

    @property
    def score_speedup(self) -> float:
        """Speedup of the distance/score computation alone, without the sort."""
        return max(self._float_score_seconds, 1e-12) / max(
            self._hamming_score_seconds, 1e-12
        )

    def _to_dict(self) -> dict:
        return {
            "m": self._m,
            "d": self._d,
            "hamming_qps": self.hamming_qps,
            "float_qps": self.float_qps,
            "speedup": self.speedup,
            "score_speedup": self.score_speedup,
        }

    def to_json_line(self) -> str:
        return to_json_line(self._to_dict())

    def __str__(self) -> str:
        return framed(
            "Retrieval Benchmark",
            [
                format_two_column(
                    bold_text("Items (m): ") + str(self._m),
                    bold_text("Bits (d): ") + str(self._d),
                ),
                format_two_column(
                    bold_text("Hamming q/s: ")
                    + color_text(f"{self.hamming_qps:.1f}", "yellow"),
                    bold_text("Float q/s: ")
                    + color_text(f"{self.float_qps:.1f}", "yellow"),
                ),
                format_two_column(
                    bold_text("Speedup: ")
                    + color_text(f"{self.speedup:.2f}x", "green"),
                    bold_text("Scoring only: ")
                    + color_text(f"{self.score_speedup:.2f}x", "green"),
                ),
            ],
        )

    def _repr_pretty_(self, p, cycle):
        if cycle:
            p.text(self.__class__.__name__ + "(...)")
        else:
            p.text(str(self))


def benchmark_speedup(
    m: int, d: int, n_queries: int, seed: int = 0, verbose: bool = False
) -> BenchmarkReport:
    """Times full rankings of n_queries random queries against m random
    items, once with packed codes and once with float32 vectors holding the
    same +/-1 values. BLAS is pinned to one thread.

    The end-to-end speedup includes the sort, and the two sides sort
    differently: small-integer Hamming keys get numpy's radix sort while
    float scores get a comparison sort. score_speedup times the distance
    and dot-product step alone so the two effects can be told apart.

    Parameters
    ----------
    m : int

    d : int

    n_queries : int

    seed : int
        Default: 0.

    verbose : bool
        Default: False.

    Returns
    -------
    BenchmarkReport
    """
    for name, value in (("m", m), ("d", d), ("n_queries", n_queries)):
        if value < 1:
            raise ValueError(f"Invalid input: {name} = {value}. Must be >= 1.")
    rng = np.random.default_rng(seed)
    item_signs = (rng.integers(0, 2, size=(m, d)) * 2 - 1).astype(np.int8)
    query_signs = (rng.integers(0, 2, size=(n_queries, d)) * 2 - 1).astype(np.int8)
    items = BinaryCodeMatrix.from_signs(item_signs)
    queries = BinaryCodeMatrix.from_signs(query_signs)
    item_vectors = item_signs.astype(np.float32)
    query_vectors = query_signs.astype(np.float32)

    with threadpool_limits(limits=1):
        hamming_rank(items.words, queries.words[0], d)
        float_rank(item_vectors, query_vectors[0])

        start = time.perf_counter()
        for q in range(n_queries):
            hamming_rank(items.words, queries.words[q], d)
        hamming_seconds = time.perf_counter() - start

        start = time.perf_counter()
        for q in range(n_queries):
            float_rank(item_vectors, query_vectors[q])
        float_seconds = time.perf_counter() - start

        start = time.perf_counter()
        for q in range(n_queries):
            hamming_scores(items.words, queries.words[q], d)
        hamming_score_seconds = time.perf_counter() - start

        start = time.perf_counter()
        for q in range(n_queries):
            float_scores(item_vectors, query_vectors[q])
        float_score_seconds = time.perf_counter() - start

    report = BenchmarkReport(
        m,
        d,
        n_queries,
        hamming_seconds,
        float_seconds,
        hamming_score_seconds,
        float_score_seconds,
    )
    if verbose:
        print_wrapped(
            f"Benchmark m = {m}, d = {d}: Hamming {report.hamming_qps:.1f} q/s, "
            f"float {report.float_qps:.1f} q/s, speedup {report.speedup:.2f}x "
            f"(scoring only {report.score_speedup:.2f}x).",
            type="UPDATE",
        )
    return report
