from .index import RetrievalIndex, top_k, rank_all, top_k_batch
from .benchmark import (
    BenchmarkReport,
    benchmark_speedup,
    hamming_scores,
    hamming_rank,
    float_rank,
)


__all__ = [
    "RetrievalIndex",
    "top_k",
    "rank_all",
    "top_k_batch",
    "BenchmarkReport",
    "benchmark_speedup",
    "hamming_scores",
    "hamming_rank",
    "float_rank",
]
