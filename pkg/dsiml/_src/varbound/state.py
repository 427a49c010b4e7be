from dataclasses import dataclass
import numpy as np
from .jj import jj_bound
from ..objective.hyperparams import Hyperparams
from ..objective.losses import batch_statistics


@dataclass
class VariationalState:
    """Variational parameters of the bound, one pair per flat triplet of the
    active batch. After a refresh x_cache holds phi = x and y_cache holds
    eta = y at the codes it was refreshed with."""

    x_cache: np.ndarray
    y_cache: np.ndarray

    @classmethod
    def fresh(cls, n_triplets: int) -> "VariationalState":
        return cls(np.zeros(n_triplets), np.zeros(n_triplets))

    def __len__(self) -> int:
        return len(self.x_cache)


def _check_aligned(state: VariationalState, batch):
    if len(state.x_cache) != batch.n_triplets or len(state.y_cache) != batch.n_triplets:
        raise ValueError(
            f"Variational state holds {len(state)} triplets, batch has "
            f"{batch.n_triplets}."
        )


def update_phi(
    state: VariationalState,
    B,
    D,
    batch,
    hp: Hyperparams,
    subset: np.ndarray | None = None,
) -> VariationalState:
    """Sets phi = x at the current codes, the minimizer of the pairwise bound
    terms over phi. Only the flat triplet positions in subset are refreshed
    when given."""
    _check_aligned(state, batch)
    x, _ = batch_statistics(B, D, batch, hp, subset)
    if subset is None:
        state.x_cache[:] = x
    else:
        state.x_cache[subset] = x
    return state


def update_eta(
    state: VariationalState,
    B,
    D,
    batch,
    hp: Hyperparams,
    subset: np.ndarray | None = None,
) -> VariationalState:
    """Sets eta = y at the current codes (see update_phi)."""
    _check_aligned(state, batch)
    _, y = batch_statistics(B, D, batch, hp, subset)
    if subset is None:
        state.y_cache[:] = y
    else:
        state.y_cache[subset] = y
    return state


def bound_objective(B, D, state: VariationalState, batch, hp: Hyperparams) -> float:
    """Variational upper bound of dsiml_objective,
    sum of jj_bound(x, phi) + lam * jj_bound(y, eta) over the batch."""
    _check_aligned(state, batch)
    if batch.n_triplets == 0:
        return 0.0
    x, y = batch_statistics(B, D, batch, hp)
    return float(
        np.sum(jj_bound(x, state.x_cache))
        + hp.lam * np.sum(jj_bound(y, state.y_cache))
    )
