from .._src.trainer.report import TrainReport
from .._src.metrics.ranking import RankingMetrics
from .._src.retrieval.benchmark import BenchmarkReport
from .._src.experiments.rq4 import RQ4Report
from .._src.experiments.grid import GridReport


__all__ = [
    "TrainReport",
    "RankingMetrics",
    "BenchmarkReport",
    "RQ4Report",
    "GridReport",
]
