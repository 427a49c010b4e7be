from .binary import (
    BinaryCodeMatrix,
    hamming_distance,
    inner_product,
    angle,
    sign_quantize,
)
from .embedding import EmbeddingMatrix
from .fileio import serialize, deserialize, save_embeddings, load_embeddings


__all__ = [
    "BinaryCodeMatrix",
    "EmbeddingMatrix",
    "hamming_distance",
    "inner_product",
    "angle",
    "sign_quantize",
    "serialize",
    "deserialize",
    "save_embeddings",
    "load_embeddings",
]
