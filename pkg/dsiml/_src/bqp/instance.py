from dataclasses import dataclass
from pathlib import Path
from typing import Literal
import numpy as np
from ..codes.binary import BinaryCodeMatrix
from ..objective.hyperparams import Hyperparams
from ..varbound.jj import pi, jj_offset
from ..varbound.state import VariationalState
from ..utils.errors import EmptyInstanceError


@dataclass(frozen=True)
class BqpInstance:
    """Binary quadratic subproblem min_b b^T A b + c^T b over {-1, +1}^d.

    Q(b) + constant equals the variational bound restricted to the owner's
    triplets, with b substituted for the owner's code.
    """

    A: np.ndarray
    c: np.ndarray
    constant: float = 0.0
    owner: int = -1
    kind: Literal["user", "item", "custom"] = "custom"

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        c = np.asarray(self.c, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or c.shape != (A.shape[0],):
            raise ValueError(
                f"Invalid input: A ~ {A.shape} and c ~ {c.shape} do not form a "
                "d x d / d pair."
            )
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(c))):
            raise ValueError("Invalid input: A and c must be finite.")
        if not np.isfinite(self.constant):
            raise ValueError("Invalid input: constant must be finite.")
        object.__setattr__(self, "A", 0.5 * (A + A.T))
        object.__setattr__(self, "c", c)

    @property
    def dim(self) -> int:
        return len(self.c)

    def evaluate(self, b: np.ndarray) -> float:
        """Q(b) = b^T A b + c^T b."""
        b = np.asarray(b, dtype=float)
        return float(b @ self.A @ b + self.c @ b)

    def bound_value(self, b: np.ndarray) -> float:
        """Q(b) + constant, the owner's partial bound at code b."""
        return self.evaluate(b) + self.constant

    def dump(self, path: Path | str) -> None:
        """Writes the debugging text format: d, the d rows of A, c, constant."""
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"{self.dim}\n")
            for row in self.A:
                f.write(" ".join(repr(float(v)) for v in row) + "\n")
            f.write(" ".join(repr(float(v)) for v in self.c) + "\n")
            f.write(f"{float(self.constant)!r}\n")


def load_instance(path: Path | str) -> BqpInstance:
    """Reads an instance written by BqpInstance.dump."""
    with open(path, "r", encoding="utf-8") as f:
        lines = [line.strip() for line in f if line.strip() != ""]
    try:
        d = int(lines[0])
        A = np.array([[float(v) for v in line.split()] for line in lines[1 : 1 + d]])
        c = np.array([float(v) for v in lines[1 + d].split()])
        constant = float(lines[2 + d])
    except (IndexError, ValueError) as e:
        raise ValueError(f"Invalid instance file {path}: {e}")
    return BqpInstance(A, c, constant)


def _signs(matrix) -> np.ndarray:
    if isinstance(matrix, BinaryCodeMatrix):
        return matrix.to_signs().astype(float)
    return np.asarray(matrix, dtype=float)


def _accumulate(
    d: int,
    P: np.ndarray,
    x0: np.ndarray,
    phi: np.ndarray,
    Q: np.ndarray,
    y0: np.ndarray,
    eta: np.ndarray,
    lam: float,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Sums the quadratic bound terms of x = P b + x0 and y = Q b + y0.

    Each term pi(xi) t^2 + t / 2 + jj_offset(xi) with t affine in b
    contributes pi p p^T to A, (2 pi t0 + 1/2) p to c and
    pi t0^2 + t0 / 2 + jj_offset(xi) to the constant.
    """
    w_x, w_y = np.asarray(pi(phi)), np.asarray(pi(eta))
    A = P.T @ (w_x[:, None] * P) + lam * (Q.T @ (w_y[:, None] * Q))
    c = P.T @ (2 * w_x * x0 + 0.5) + lam * (Q.T @ (2 * w_y * y0 + 0.5))
    constant = np.sum(w_x * x0**2 + x0 / 2 + jj_offset(phi)) + lam * np.sum(
        w_y * y0**2 + y0 / 2 + jj_offset(eta)
    )
    return A.reshape(d, d), c.reshape(d), float(constant)


def assemble_user_subproblem(
    u: int,
    B,
    D,
    state: VariationalState,
    batch,
    hp: Hyperparams,
    positions: np.ndarray | None = None,
) -> BqpInstance:
    """Builds the BQP over user u's code from the current variational state.

    With the item codes fixed, x = p^T b + x0 and y = q^T b + y0 where
    p = (d_j - d_i) / (2d), x0 = 0, q = 2 gamma^2 d_j - (1 + gamma^2) d_i and
    y0 = 2 gamma^2 d_i^T d_j.

    Parameters
    ----------
    u : int

    B : BinaryCodeMatrix | np.ndarray
        User codes (unused by the coefficients; accepted for symmetry).

    D : BinaryCodeMatrix | np.ndarray
        Item codes.

    state : VariationalState

    batch : TripletBatch

    hp : Hyperparams

    positions : np.ndarray | None
        Default: None. Flat triplet positions owned by u, if already known.

    Returns
    -------
    BqpInstance
    """
    users, items_i, items_j = batch.triplets()
    if positions is None:
        positions = np.flatnonzero(users == u)
    if len(positions) == 0:
        raise EmptyInstanceError(f"User {u} has no triplets in the batch.")
    D = _signs(D)
    d = D.shape[1]
    g2 = hp.gamma**2
    d_i, d_j = D[items_i[positions]], D[items_j[positions]]

    P = (d_j - d_i) / (2 * d)
    x0 = np.zeros(len(positions))
    Q = 2 * g2 * d_j - (1 + g2) * d_i
    y0 = 2 * g2 * np.einsum("tk,tk->t", d_i, d_j)
    A, c, constant = _accumulate(
        d, P, x0, state.x_cache[positions], Q, y0, state.y_cache[positions], hp.lam
    )
    return BqpInstance(A, c, constant, owner=int(u), kind="user")


def assemble_item_subproblem(
    item: int,
    B,
    D,
    state: VariationalState,
    batch,
    hp: Hyperparams,
    positive_positions: np.ndarray | None = None,
    negative_positions: np.ndarray | None = None,
) -> BqpInstance:
    """Builds the BQP over one item's code from the current variational state.

    The item contributes through every triplet where it is the positive
    (p = -b_u / (2d), x0 = b_u^T d_j / (2d), q = 2 gamma^2 d_j - (1 + gamma^2)
    b_u, y0 = 2 gamma^2 b_u^T d_j) and every triplet where it is the negative
    (p = b_u / (2d), x0 = -b_u^T d_i / (2d), q = 2 gamma^2 (b_u + d_i),
    y0 = -(1 + gamma^2) b_u^T d_i).

    Parameters
    ----------
    item : int

    B : BinaryCodeMatrix | np.ndarray
        User codes.

    D : BinaryCodeMatrix | np.ndarray
        Item codes; the row of `item` itself is not read.

    state : VariationalState

    batch : TripletBatch

    hp : Hyperparams

    positive_positions, negative_positions : np.ndarray | None
        Default: None. Flat triplet positions where the item is the positive
        / the negative, if already known.

    Returns
    -------
    BqpInstance
    """
    users, items_i, items_j = batch.triplets()
    if positive_positions is None:
        positive_positions = np.flatnonzero(items_i == item)
    if negative_positions is None:
        negative_positions = np.flatnonzero(items_j == item)
    if len(positive_positions) == 0 and len(negative_positions) == 0:
        raise EmptyInstanceError(f"Item {item} has no triplets in the batch.")
    B, D = _signs(B), _signs(D)
    d = D.shape[1]
    g2 = hp.gamma**2

    pos, neg = positive_positions, negative_positions
    b_pos, d_j = B[users[pos]], D[items_j[pos]]
    ip_pos = np.einsum("tk,tk->t", b_pos, d_j)
    b_neg, d_i = B[users[neg]], D[items_i[neg]]
    ip_neg = np.einsum("tk,tk->t", b_neg, d_i)

    P = np.concatenate([-b_pos / (2 * d), b_neg / (2 * d)])
    x0 = np.concatenate([ip_pos / (2 * d), -ip_neg / (2 * d)])
    Q = np.concatenate([2 * g2 * d_j - (1 + g2) * b_pos, 2 * g2 * (b_neg + d_i)])
    y0 = np.concatenate([2 * g2 * ip_pos, -(1 + g2) * ip_neg])
    owned = np.concatenate([pos, neg])
    A, c, constant = _accumulate(
        d, P, x0, state.x_cache[owned], Q, y0, state.y_cache[owned], hp.lam
    )
    return BqpInstance(A, c, constant, owner=int(item), kind="item")
