import time
from typing import Callable
import numpy as np
from .report import TrainReport
from ..codes.embedding import EmbeddingMatrix
from ..data.interactions import InteractionSet
from ..data.sampling import sample_npair_batch, iter_user_batches
from ..display.print_utils import print_wrapped, format_value
from ..objective.hyperparams import Hyperparams
from ..objective.losses import siml_objective, cml_objective, bpr_objective
from ..objective.gradients import siml_gradients, cml_gradients, bpr_gradients
from ..utils.errors import DataError, DivergenceError
from ..utils.helpers import derive_seed


# seed streams
_INIT_STREAM = 0
_EPOCH_STREAM = 1
_MONITOR_STREAM = 2


def _clip_rows(values: np.ndarray, max_norm: float):
    norms = np.linalg.norm(values, axis=1)
    over = norms > max_norm
    values[over] *= (max_norm / norms[over])[:, None]


def _train_continuous(
    data: InteractionSet,
    hp: Hyperparams,
    model: str,
    objective_fn: Callable,
    gradient_fn: Callable,
    verbose: bool,
) -> tuple[EmbeddingMatrix, EmbeddingMatrix, TrainReport]:
    """Mini-batch gradient descent shared by the continuous trainers.

    Every epoch partitions the users into random groups of hp.batch_users;
    each group gets a fresh N-pair batch and one summed-gradient step. The
    objective is monitored on one fixed N-pair batch drawn once per run.
    All hp.epochs epochs run; the report is marked converged when the
    last epoch changed the monitored objective by less than hp.tol.
    """
    if len(data.pairs("train")[0]) == 0:
        raise DataError("Training requires a nonempty train split.")
    report = TrainReport(model, hp.to_dict())
    start = time.perf_counter()

    init_rng = derive_seed(hp.seed, _INIT_STREAM)
    U = init_rng.normal(0.0, hp.init_scale, size=(data.n_users, hp.dim))
    V = init_rng.normal(0.0, hp.init_scale, size=(data.n_items, hp.dim))
    max_norm = np.sqrt(hp.dim)

    monitor = sample_npair_batch(
        data, None, hp.n_neg, derive_seed(hp.seed, _MONITOR_STREAM)
    )
    previous = objective_fn(U, V, monitor, hp)
    report.record(0, "init", previous)
    change = np.inf

    for epoch in range(1, hp.epochs + 1):
        rng = derive_seed(hp.seed, _EPOCH_STREAM, epoch)
        for users in iter_user_batches(data.n_users, hp.batch_users, rng):
            batch = sample_npair_batch(data, users, hp.n_neg, rng)
            grad_U, grad_V = gradient_fn(U, V, batch, hp)
            U -= hp.learning_rate * grad_U
            V -= hp.learning_rate * grad_V
            if hp.clip_norm:
                _clip_rows(U, max_norm)
                _clip_rows(V, max_norm)

        value = objective_fn(U, V, monitor, hp)
        finite = np.isfinite(value) and np.isfinite(U).all() and np.isfinite(V).all()
        if not finite:
            raise DivergenceError(
                f"{model.upper()} diverged at epoch {epoch}: objective = {value}.",
                report,
            )
        report.record(epoch, "epoch", value, elapsed=time.perf_counter() - start)
        change = abs(previous - value) / max(abs(previous), 1e-12)
        previous = value
        if verbose:
            print_wrapped(
                f"{model.upper()} epoch {epoch}/{hp.epochs}: "
                f"objective {format_value(value)}.",
                type="PROGRESS",
            )

    report.mark_converged(bool(change < hp.tol))
    U_out, V_out = EmbeddingMatrix(U), EmbeddingMatrix(V)
    report.set_checksums(
        user_embeddings=U_out.checksum(), item_embeddings=V_out.checksum()
    )
    if verbose:
        print_wrapped(
            f"{model.upper()} finished {hp.epochs} epoch(s) in "
            f"{time.perf_counter() - start:.2f} s.",
            type="UPDATE",
        )
    return U_out, V_out, report


def train_siml(
    data: InteractionSet, hp: Hyperparams, verbose: bool = False
) -> tuple[EmbeddingMatrix, EmbeddingMatrix, TrainReport]:
    """Trains the continuous scale-invariant model (codes relaxed to reals).

    Parameters
    ----------
    data : InteractionSet

    hp : Hyperparams

    verbose : bool
        Default: False. If True, prints per-epoch progress.

    Returns
    -------
    tuple[EmbeddingMatrix, EmbeddingMatrix, TrainReport]
        User embeddings, item embeddings and the trajectory.

    Raises
    ------
    DivergenceError
        If the objective becomes non-finite; the partial report is attached.
    """
    return _train_continuous(data, hp, "siml", siml_objective, siml_gradients, verbose)


def train_cml(
    data: InteractionSet, hp: Hyperparams, verbose: bool = False
) -> tuple[EmbeddingMatrix, EmbeddingMatrix, TrainReport]:
    """Trains the fixed-margin CML-style baseline (margin hp.cml_margin)
    under the same batching and budget as train_siml."""
    return _train_continuous(data, hp, "cml", cml_objective, cml_gradients, verbose)


def train_bpr(
    data: InteractionSet, hp: Hyperparams, verbose: bool = False
) -> tuple[EmbeddingMatrix, EmbeddingMatrix, TrainReport]:
    """Trains the BPR-style pairwise baseline under the same batching and
    budget as train_siml."""
    return _train_continuous(data, hp, "bpr", bpr_objective, bpr_gradients, verbose)
