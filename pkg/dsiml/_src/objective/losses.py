import numpy as np
from ..codes.binary import BinaryCodeMatrix, hamming_distance
from ..codes.embedding import EmbeddingMatrix
from ..utils.errors import DimensionMismatchError
from .hyperparams import Hyperparams


def _check_dims(*arrays: np.ndarray) -> int:
    dims = {a.shape[-1] for a in arrays}
    if len(dims) != 1:
        raise DimensionMismatchError(f"Vector dimensions differ: {sorted(dims)}.")
    return dims.pop()


def _as_float(value):
    value = np.asarray(value, dtype=float)
    return float(value) if value.ndim == 0 else value


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("...k,...k->...", a, b)


def softplus(t):
    """Overflow-safe log(1 + e^t)."""
    return _as_float(np.logaddexp(0.0, np.asarray(t, dtype=float)))


def pairwise_loss(x):
    """Smooth surrogate of the pairwise ranking term, softplus(x)."""
    return softplus(x)


def scale_loss(y):
    """Smooth upper bound of the scale-invariant hinge, softplus(y)."""
    return softplus(y)


def predicted_rating(b_u, d_i):
    """Predicted preference 1/2 + b_u^T d_i / (2d).

    For code rows this equals 1 - hamming_distance / d and lies in [0, 1].

    Parameters
    ----------
    b_u : BinaryCodeMatrix | np.ndarray ~ (..., d)

    d_i : BinaryCodeMatrix | np.ndarray ~ (..., d)

    Returns
    -------
    float | np.ndarray
    """
    if isinstance(b_u, BinaryCodeMatrix) and isinstance(d_i, BinaryCodeMatrix):
        dist = np.asarray(hamming_distance(b_u, d_i), dtype=float)
        return _as_float(1.0 - dist / b_u.dim)
    b_u, d_i = np.asarray(b_u, dtype=float), np.asarray(d_i, dtype=float)
    d = _check_dims(b_u, d_i)
    return _as_float(0.5 + _dot(b_u, d_i) / (2 * d))


def scale_hinge_argument(b_u, d_i, d_j, gamma: float):
    """Argument of the scale-invariant margin hinge,
    ||b_u - d_i||^2 - gamma^2 ||2 d_j - (b_u + d_i)||^2.

    Negative values mean the negative item d_j lies outside the cone of
    half-angle arctan(gamma) around the user/positive midpoint.
    """
    b_u, d_i, d_j = (np.asarray(v, dtype=float) for v in (b_u, d_i, d_j))
    _check_dims(b_u, d_i, d_j)
    near = b_u - d_i
    far = 2 * d_j - (b_u + d_i)
    return _as_float(_dot(near, near) - gamma**2 * _dot(far, far))


def scale_hinge_loss(b_u, d_i, d_j, gamma: float):
    """Hinge on the midpoint geometry, max(0, ||o_i||^2 - gamma^2 ||o_j||^2)
    with o = (b_u + d_i) / 2. Homogeneous of degree 2 in the vectors."""
    return _as_float(
        np.maximum(0.0, np.asarray(scale_hinge_argument(b_u, d_i, d_j, gamma)) / 4)
    )


def _statistics_from_inner(ip_ui, ip_uj, ip_ij, gamma: float, d: int):
    x = (ip_uj - ip_ui) / (2 * d)
    g2 = gamma**2
    y = 2 * g2 * (ip_uj + ip_ij) - (1 + g2) * ip_ui
    return x, y


def triplet_statistics(b_u, d_i, d_j, gamma: float, d: int | None = None):
    """Per-triplet statistics (x, y).

    x = (b_u^T d_j - b_u^T d_i) / (2d) is the predicted-rating gap r_uj - r_ui,
    y = 2 gamma^2 (b_u^T d_j + d_i^T d_j) - (1 + gamma^2) b_u^T d_i collects
    the code-dependent part of the scale-invariant hinge argument.

    Parameters
    ----------
    b_u, d_i, d_j : np.ndarray ~ (..., d)

    gamma : float

    d : int | None
        Default: None. If None, the last-axis length is used.

    Returns
    -------
    tuple[float | np.ndarray, float | np.ndarray]
    """
    b_u, d_i, d_j = (np.asarray(v, dtype=float) for v in (b_u, d_i, d_j))
    dim = _check_dims(b_u, d_i, d_j)
    x, y = _statistics_from_inner(
        _dot(b_u, d_i), _dot(b_u, d_j), _dot(d_i, d_j), gamma, dim if d is None else d
    )
    return _as_float(x), _as_float(y)


def _pair_inner(left, right, rows_left: np.ndarray, rows_right: np.ndarray):
    """Inner products between left[rows_left[t]] and right[rows_right[t]]."""
    if isinstance(left, BinaryCodeMatrix):
        dist = np.bitwise_count(
            left.words[rows_left] ^ right.words[rows_right]
        ).sum(axis=1, dtype=np.int64)
        return (left.dim - 2 * dist).astype(float)
    return _dot(left[rows_left], right[rows_right])


def _unwrap(matrix):
    if isinstance(matrix, EmbeddingMatrix):
        return matrix.values
    if isinstance(matrix, BinaryCodeMatrix):
        return matrix
    return np.asarray(matrix, dtype=float)


def _dim(matrix) -> int:
    return matrix.dim if isinstance(matrix, BinaryCodeMatrix) else matrix.shape[1]


def batch_statistics(
    users_repr,
    items_repr,
    batch,
    hp: Hyperparams,
    subset: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Statistics (x, y) of every flat triplet of a batch.

    Parameters
    ----------
    users_repr, items_repr : BinaryCodeMatrix | EmbeddingMatrix | np.ndarray
        User and item representations. Codes may also be passed as +/-1
        arrays.

    batch : TripletBatch

    hp : Hyperparams

    subset : np.ndarray | None
        Default: None. Flat triplet positions to evaluate. None means all.

    Returns
    -------
    tuple[np.ndarray, np.ndarray]
    """
    left, right = _unwrap(users_repr), _unwrap(items_repr)
    if _dim(left) != _dim(right):
        raise DimensionMismatchError(
            f"User dim {_dim(left)} differs from item dim {_dim(right)}."
        )
    u, i, j = batch.triplets()
    if subset is not None:
        u, i, j = u[subset], i[subset], j[subset]
    if len(u) == 0:
        return np.zeros(0), np.zeros(0)
    ip_ui = _pair_inner(left, right, u, i)
    ip_uj = _pair_inner(left, right, u, j)
    ip_ij = _pair_inner(right, right, i, j)
    return _statistics_from_inner(ip_ui, ip_uj, ip_ij, hp.gamma, _dim(left))


def dsiml_objective(B, D, batch, hp: Hyperparams) -> float:
    """Sum over the batch's triplets of softplus(x) + lam * softplus(y) at the
    codes B (users) and D (items). An empty batch scores 0."""
    x, y = batch_statistics(B, D, batch, hp)
    return float(np.sum(np.logaddexp(0.0, x)) + hp.lam * np.sum(np.logaddexp(0.0, y)))


def siml_objective(U, V, batch, hp: Hyperparams) -> float:
    """Continuous counterpart of dsiml_objective, with real embeddings in
    place of codes."""
    return dsiml_objective(U, V, batch, hp)


def cml_loss(b_u, d_i, d_j, m: float):
    """Fixed-margin hinge [||b_u - d_i||^2 - ||b_u - d_j||^2 + m]_+."""
    b_u, d_i, d_j = (np.asarray(v, dtype=float) for v in (b_u, d_i, d_j))
    _check_dims(b_u, d_i, d_j)
    pos, neg = b_u - d_i, b_u - d_j
    return _as_float(np.maximum(0.0, _dot(pos, pos) - _dot(neg, neg) + m))


def bpr_loss(u, v_i, v_j, reg: float = 0.0):
    """Pairwise logistic loss softplus(u^T v_j - u^T v_i) plus
    reg / 2 * (||u||^2 + ||v_i||^2 + ||v_j||^2)."""
    u, v_i, v_j = (np.asarray(v, dtype=float) for v in (u, v_i, v_j))
    _check_dims(u, v_i, v_j)
    penalty = 0.5 * reg * (_dot(u, u) + _dot(v_i, v_i) + _dot(v_j, v_j))
    return _as_float(np.logaddexp(0.0, _dot(u, v_j) - _dot(u, v_i)) + penalty)


def _gather(U, V, batch):
    Uv, Vv = _unwrap(U), _unwrap(V)
    u, i, j = batch.triplets()
    return Uv[u], Vv[i], Vv[j]


def cml_objective(U, V, batch, hp: Hyperparams) -> float:
    """Batch sum of cml_loss with margin hp.cml_margin."""
    if batch.n_triplets == 0:
        return 0.0
    return float(np.sum(cml_loss(*_gather(U, V, batch), hp.cml_margin)))


def bpr_objective(U, V, batch, hp: Hyperparams) -> float:
    """Batch sum of bpr_loss with weight hp.bpr_reg."""
    if batch.n_triplets == 0:
        return 0.0
    return float(np.sum(bpr_loss(*_gather(U, V, batch), hp.bpr_reg)))
