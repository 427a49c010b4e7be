import numpy as np
from scipy.special import expit
from ..codes.embedding import EmbeddingMatrix
from .hyperparams import Hyperparams


def _values(matrix) -> np.ndarray:
    if isinstance(matrix, EmbeddingMatrix):
        return matrix.values
    return np.asarray(matrix, dtype=float)


def _scatter(U, V, batch, g_u, g_i, g_j) -> tuple[np.ndarray, np.ndarray]:
    u, i, j = batch.triplets()
    grad_U = np.zeros_like(U)
    grad_V = np.zeros_like(V)
    np.add.at(grad_U, u, g_u)
    np.add.at(grad_V, i, g_i)
    np.add.at(grad_V, j, g_j)
    return grad_U, grad_V


def siml_gradients(U, V, batch, hp: Hyperparams) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of siml_objective with respect to the user and item
    embeddings.

    Parameters
    ----------
    U : EmbeddingMatrix | np.ndarray ~ (n_users, d)

    V : EmbeddingMatrix | np.ndarray ~ (n_items, d)

    batch : TripletBatch

    hp : Hyperparams

    Returns
    -------
    tuple[np.ndarray, np.ndarray]
        Summed per-triplet gradients, shaped like U and V.
    """
    U, V = _values(U), _values(V)
    u, i, j = batch.triplets()
    b_u, d_i, d_j = U[u], V[i], V[j]
    d = U.shape[1]
    g2 = hp.gamma**2

    ip_ui = np.einsum("tk,tk->t", b_u, d_i)
    ip_uj = np.einsum("tk,tk->t", b_u, d_j)
    ip_ij = np.einsum("tk,tk->t", d_i, d_j)
    x = (ip_uj - ip_ui) / (2 * d)
    y = 2 * g2 * (ip_uj + ip_ij) - (1 + g2) * ip_ui
    sx = expit(x)[:, None]
    sy = hp.lam * expit(y)[:, None]

    g_u = sx * (d_j - d_i) / (2 * d) + sy * (2 * g2 * d_j - (1 + g2) * d_i)
    g_i = -sx * b_u / (2 * d) + sy * (2 * g2 * d_j - (1 + g2) * b_u)
    g_j = sx * b_u / (2 * d) + sy * (2 * g2 * (b_u + d_i))
    return _scatter(U, V, batch, g_u, g_i, g_j)


def cml_gradients(U, V, batch, hp: Hyperparams) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of the fixed-margin hinge; inactive triplets contribute 0."""
    U, V = _values(U), _values(V)
    u, i, j = batch.triplets()
    b_u, d_i, d_j = U[u], V[i], V[j]
    pos, neg = b_u - d_i, b_u - d_j
    active = (
        np.einsum("tk,tk->t", pos, pos) - np.einsum("tk,tk->t", neg, neg)
        + hp.cml_margin
        > 0
    )[:, None]
    g_u = np.where(active, 2 * (d_j - d_i), 0.0)
    g_i = np.where(active, -2 * pos, 0.0)
    g_j = np.where(active, 2 * neg, 0.0)
    return _scatter(U, V, batch, g_u, g_i, g_j)


def bpr_gradients(U, V, batch, hp: Hyperparams) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of the pairwise logistic loss with per-triplet L2."""
    U, V = _values(U), _values(V)
    u, i, j = batch.triplets()
    b_u, d_i, d_j = U[u], V[i], V[j]
    s = expit(np.einsum("tk,tk->t", b_u, d_j - d_i))[:, None]
    reg = hp.bpr_reg
    g_u = s * (d_j - d_i) + reg * b_u
    g_i = -s * b_u + reg * d_i
    g_j = s * b_u + reg * d_j
    return _scatter(U, V, batch, g_u, g_i, g_j)
