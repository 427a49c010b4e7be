from .synthetic import SyntheticGeometry, generate_imbalanced_synthetic
from .rq4 import RQ4Report, run_rq4
from .grid import GridReport, iter_grid, run_grid


__all__ = [
    "SyntheticGeometry",
    "generate_imbalanced_synthetic",
    "RQ4Report",
    "run_rq4",
    "GridReport",
    "iter_grid",
    "run_grid",
]
