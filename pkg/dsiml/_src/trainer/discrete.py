import time
from concurrent.futures import ThreadPoolExecutor
import numpy as np
from .continuous import train_siml
from .report import TrainReport
from ..bqp.instance import assemble_user_subproblem, assemble_item_subproblem
from ..bqp.solvers import solve
from ..codes.binary import BinaryCodeMatrix, sign_quantize
from ..codes.embedding import EmbeddingMatrix
from ..data.interactions import InteractionSet
from ..data.sampling import TripletBatch, sample_npair_batch
from ..display.compute_options import compute_options
from ..display.print_utils import print_wrapped, format_value
from ..objective.hyperparams import Hyperparams
from ..objective.losses import dsiml_objective
from ..utils.errors import DataError, DivergenceError
from ..utils.helpers import derive_seed, group_indices
from ..varbound.state import (
    VariationalState,
    update_phi,
    update_eta,
    bound_objective,
)


# seed streams
_SAMPLING_STREAM = 10
_USER_STREAM = 11
_ITEM_STREAM = 12


def _initial_signs(init) -> np.ndarray:
    if isinstance(init, BinaryCodeMatrix):
        return init.to_signs().astype(float)
    if isinstance(init, EmbeddingMatrix):
        return sign_quantize(init).to_signs().astype(float)
    raise TypeError(
        "Invalid input: init must hold EmbeddingMatrix or BinaryCodeMatrix values."
    )


class _BatchIndex:
    """A sampled batch with its variational state and per-entity triplet
    positions."""

    def __init__(self, batch: TripletBatch, n_users: int, n_items: int):
        u, i, j = batch.triplets()
        self.batch = batch
        self.state = VariationalState.fresh(batch.n_triplets)
        self.by_user = group_indices(u, n_users)
        self.by_positive = group_indices(i, n_items)
        self.by_negative = group_indices(j, n_items)


def _refresh(B, D, index: _BatchIndex, hp: Hyperparams, subset=None):
    update_phi(index.state, B, D, index.batch, hp, subset)
    update_eta(index.state, B, D, index.batch, hp, subset)


def _solve_user(u: int, B, D, index: _BatchIndex, hp: Hyperparams, iteration: int):
    positions = index.by_user[u]
    _refresh(B, D, index, hp, positions)
    inst = assemble_user_subproblem(
        u, B, D, index.state, index.batch, hp, positions=positions
    )
    code, _ = solve(inst, B[u], hp, derive_seed(hp.seed, _USER_STREAM, iteration, u))
    return code


def train_dsiml(
    data: InteractionSet,
    hp: Hyperparams,
    init: tuple | None = None,
    verbose: bool = False,
) -> tuple[BinaryCodeMatrix, BinaryCodeMatrix, TrainReport]:
    """Learns binary user and item codes by alternating minimization of the
    variational bound.

    Every outer iteration:

    1. refreshes all variational parameters at the current codes
       ('refresh_users'), then solves each user's BQP warm-started at its
       current code, refreshing that user's parameters first ('user_codes');
    2. refreshes all variational parameters again ('refresh_items'), then
       solves each item's BQP in ascending id order, refreshing that item's
       parameters first ('item_codes').

    Users are independent given the item codes and may be solved on
    compute_options.n_threads threads. Items share triplets through
    d_i^T d_j and are solved in sequence. The run stops once the relative
    bound decrease over an outer iteration drops below hp.tol, or after
    hp.max_iters iterations.

    Parameters
    ----------
    data : InteractionSet

    hp : Hyperparams

    init : tuple | None
        Default: None. (user, item) pair of EmbeddingMatrix (sign-quantized)
        or BinaryCodeMatrix. If None, train_siml runs first and its
        embeddings are sign-quantized.

    verbose : bool
        Default: False.

    Returns
    -------
    tuple[BinaryCodeMatrix, BinaryCodeMatrix, TrainReport]
        User codes B, item codes D and the sub-step trajectory.
    """
    if len(data.pairs("train")[0]) == 0:
        raise DataError("Training requires a nonempty train split.")
    if init is None:
        if verbose:
            print_wrapped(
                "No initialization given. Training the continuous model first.",
                type="NOTE",
            )
        U, V, _ = train_siml(data, hp, verbose=verbose)
        init = (U, V)
    B, D = _initial_signs(init[0]), _initial_signs(init[1])
    if B.shape != (data.n_users, hp.dim) or D.shape != (data.n_items, hp.dim):
        raise ValueError(
            f"Invalid input: init shapes {B.shape}, {D.shape} do not match "
            f"({data.n_users}, {hp.dim}) and ({data.n_items}, {hp.dim})."
        )

    report = TrainReport("dsiml", hp.to_dict())
    start_time = time.perf_counter()
    n_threads = compute_options.n_threads
    index = None

    def _record(iteration: int, step: str) -> float:
        bound = bound_objective(B, D, index.state, index.batch, hp)
        objective = dsiml_objective(B, D, index.batch, hp)
        report.record(
            iteration, step, objective, bound, time.perf_counter() - start_time
        )
        if not (np.isfinite(bound) and np.isfinite(objective)):
            raise DivergenceError(
                f"DSIML produced a non-finite bound at iteration {iteration} "
                f"({step}).",
                report,
            )
        return bound

    for iteration in range(1, hp.max_iters + 1):
        if index is None or hp.resample_negatives:
            batch = sample_npair_batch(
                data,
                None,
                hp.n_neg,
                derive_seed(hp.seed, _SAMPLING_STREAM, iteration),
            )
            index = _BatchIndex(batch, data.n_users, data.n_items)

        _refresh(B, D, index, hp)
        start_bound = _record(iteration, "refresh_users")

        users = [u for u in range(data.n_users) if len(index.by_user[u]) > 0]
        if n_threads > 1:
            with ThreadPoolExecutor(max_workers=n_threads) as pool:
                codes = list(
                    pool.map(
                        lambda u: _solve_user(u, B, D, index, hp, iteration), users
                    )
                )
        else:
            codes = [_solve_user(u, B, D, index, hp, iteration) for u in users]
        for u, code in zip(users, codes):
            B[u] = code
        _record(iteration, "user_codes")

        _refresh(B, D, index, hp)
        _record(iteration, "refresh_items")

        for item in range(data.n_items):
            pos, neg = index.by_positive[item], index.by_negative[item]
            if len(pos) == 0 and len(neg) == 0:
                continue
            _refresh(B, D, index, hp, np.concatenate([pos, neg]))
            inst = assemble_item_subproblem(
                item,
                B,
                D,
                index.state,
                index.batch,
                hp,
                positive_positions=pos,
                negative_positions=neg,
            )
            code, _ = solve(
                inst, D[item], hp, derive_seed(hp.seed, _ITEM_STREAM, iteration, item)
            )
            D[item] = code
        end_bound = _record(iteration, "item_codes")

        decrease = (start_bound - end_bound) / max(abs(start_bound), 1e-12)
        if verbose:
            print_wrapped(
                f"DSIML iteration {iteration}/{hp.max_iters}: bound "
                f"{format_value(start_bound)} -> {format_value(end_bound)}.",
                type="PROGRESS",
            )
        if decrease < hp.tol:
            report.mark_converged(True)
            break

    B_out = BinaryCodeMatrix.from_signs(B.astype(np.int8))
    D_out = BinaryCodeMatrix.from_signs(D.astype(np.int8))
    report.set_checksums(user_codes=B_out.checksum(), item_codes=D_out.checksum())
    if verbose:
        print_wrapped(
            f"DSIML stopped after {report.n_iterations} iteration(s) "
            f"({'converged' if report.converged else 'max_iters reached'}).",
            type="UPDATE",
        )
    return B_out, D_out, report
