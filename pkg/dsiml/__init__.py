"""
dsiml
-----
Binary-code recommendation with scale-invariant angular margins.
"""

from ._src.data import (
    InteractionSet,
    load_interactions,
    load_split,
    write_interactions,
    filter_min_degree,
    split_train_test,
    sample_npair_batch,
)
from ._src.codes import (
    BinaryCodeMatrix,
    EmbeddingMatrix,
    hamming_distance,
    inner_product,
    sign_quantize,
    serialize,
    deserialize,
)
from ._src.objective import Hyperparams, dsiml_objective, siml_objective
from ._src.varbound import jj_bound
from ._src.bqp import (
    BqpInstance,
    assemble_user_subproblem,
    assemble_item_subproblem,
    solve,
)
from ._src.trainer import (
    train_siml,
    train_cml,
    train_bpr,
    train_dsiml,
    train_model,
    TrainedModel,
    save_checkpoint,
    load_checkpoint,
)
from ._src.retrieval import RetrievalIndex, top_k, benchmark_speedup
from ._src.metrics import ndcg_at_k, hr_at_k, evaluate_model
from ._src.experiments import generate_imbalanced_synthetic, run_rq4, run_grid
from . import options
from . import reports
from . import errors


__all__ = [
    "InteractionSet",
    "load_interactions",
    "load_split",
    "write_interactions",
    "filter_min_degree",
    "split_train_test",
    "sample_npair_batch",
    "BinaryCodeMatrix",
    "EmbeddingMatrix",
    "hamming_distance",
    "inner_product",
    "sign_quantize",
    "serialize",
    "deserialize",
    "Hyperparams",
    "dsiml_objective",
    "siml_objective",
    "jj_bound",
    "BqpInstance",
    "assemble_user_subproblem",
    "assemble_item_subproblem",
    "solve",
    "train_siml",
    "train_cml",
    "train_bpr",
    "train_dsiml",
    "train_model",
    "TrainedModel",
    "save_checkpoint",
    "load_checkpoint",
    "RetrievalIndex",
    "top_k",
    "benchmark_speedup",
    "ndcg_at_k",
    "hr_at_k",
    "evaluate_model",
    "generate_imbalanced_synthetic",
    "run_rq4",
    "run_grid",
    "options",
    "reports",
    "errors",
]


__version__ = "0.1.0a1"
