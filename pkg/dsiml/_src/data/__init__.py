from .interactions import (
    InteractionSet,
    load_interactions,
    load_split,
    write_interactions,
    filter_min_degree,
    split_train_test,
)
from .sampling import (
    TripletBatch,
    sample_negatives,
    sample_npair_batch,
    iter_user_batches,
)


__all__ = [
    "InteractionSet",
    "load_interactions",
    "load_split",
    "write_interactions",
    "filter_min_degree",
    "split_train_test",
    "TripletBatch",
    "sample_negatives",
    "sample_npair_batch",
    "iter_user_batches",
]
