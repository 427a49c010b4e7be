import numpy as np
from .instance import BqpInstance
from ..objective.hyperparams import Hyperparams
from ..utils.errors import SolverCapacityError


MAX_EXHAUSTIVE_DIM = 16
IMPROVEMENT_TOL = 1e-12
_CHUNK = 4096


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def solve_exhaustive(inst: BqpInstance) -> tuple[np.ndarray, float]:
    """Global minimizer of b^T A b + c^T b by enumeration of all 2^d codes.

    Candidates are visited in lexicographic order with -1 < +1; among values
    within 1e-12 of the minimum the first (lexicographically smallest) wins.

    Returns
    -------
    tuple[np.ndarray, float]
        The int8 +/-1 minimizer and Q at it.
    """
    d = inst.dim
    if d > MAX_EXHAUSTIVE_DIM:
        raise SolverCapacityError(
            f"Exhaustive search is limited to d <= {MAX_EXHAUSTIVE_DIM}, got d = {d}."
        )
    shifts = np.arange(d - 1, -1, -1, dtype=np.int64)
    values = np.empty(2**d)
    for start in range(0, 2**d, _CHUNK):
        n = np.arange(start, min(start + _CHUNK, 2**d), dtype=np.int64)
        X = (((n[:, None] >> shifts) & 1) * 2 - 1).astype(float)
        values[start : start + len(n)] = np.einsum(
            "nk,kl,nl->n", X, inst.A, X
        ) + X @ inst.c
    v_min = values.min()
    best = int(np.flatnonzero(values <= v_min + IMPROVEMENT_TOL)[0])
    b = (((best >> shifts) & 1) * 2 - 1).astype(np.int8)
    return b, inst.evaluate(b)


def _descend(inst: BqpInstance, b: np.ndarray) -> np.ndarray:
    """Best-improvement single-bit flips until no flip lowers Q."""
    A, c = inst.A, inst.c
    diag = np.diag(A)
    g = A @ b
    while True:
        # Q(flip_k(b)) - Q(b)
        delta = 4 * diag - 4 * b * g - 2 * b * c
        k = int(np.argmin(delta))
        if delta[k] >= -IMPROVEMENT_TOL:
            return b
        s = b[k]
        b[k] = -s
        g -= 2 * s * A[:, k]


def solve_flip_descent(
    inst: BqpInstance,
    warm_start: np.ndarray,
    restarts: int = 1,
    seed: int | np.random.Generator = 0,
) -> tuple[np.ndarray, float]:
    """Multi-start best-improvement local search over whole codes.

    The first trajectory starts at warm_start; each of the remaining
    restarts - 1 starts at a uniformly random code drawn from one seeded
    stream, so adding restarts never worsens the result. Each flip is scored
    in O(d) from the maintained product A b.

    Parameters
    ----------
    inst : BqpInstance

    warm_start : np.ndarray ~ (d,)
        +/-1 starting code.

    restarts : int
        Default: 1. Number of trajectories, >= 1.

    seed : int | np.random.Generator
        Default: 0.

    Returns
    -------
    tuple[np.ndarray, float]
        The best int8 code found and Q at it; never above Q(warm_start).
    """
    warm_start = np.asarray(warm_start, dtype=float).ravel()
    if warm_start.shape != (inst.dim,):
        raise ValueError(
            f"Invalid input: warm_start has shape {warm_start.shape}, "
            f"expected ({inst.dim},)."
        )
    if restarts < 1:
        raise ValueError(f"Invalid input: restarts = {restarts}. Must be >= 1.")
    rng = _rng(seed)
    best = _descend(inst, warm_start.copy())
    best_value = inst.evaluate(best)
    for _ in range(restarts - 1):
        start = (rng.integers(0, 2, size=inst.dim) * 2 - 1).astype(float)
        candidate = _descend(inst, start)
        value = inst.evaluate(candidate)
        if value < best_value:
            best, best_value = candidate, value
    return best.astype(np.int8), best_value


def solve_coordinate_descent(
    inst: BqpInstance, warm_start: np.ndarray, max_sweeps: int = 100
) -> tuple[np.ndarray, float]:
    """Bitwise discrete coordinate descent: cyclic sweeps flipping each bit
    whenever that lowers Q, until a sweep changes nothing."""
    b = np.asarray(warm_start, dtype=float).ravel().copy()
    A, c = inst.A, inst.c
    diag = np.diag(A)
    g = A @ b
    for _ in range(max_sweeps):
        changed = False
        for k in range(inst.dim):
            if 4 * diag[k] - 4 * b[k] * g[k] - 2 * b[k] * c[k] < -IMPROVEMENT_TOL:
                s = b[k]
                b[k] = -s
                g -= 2 * s * A[:, k]
                changed = True
        if not changed:
            break
    return b.astype(np.int8), inst.evaluate(b)


def solve(
    inst: BqpInstance,
    warm_start: np.ndarray,
    hp: Hyperparams,
    seed: int | np.random.Generator = 0,
) -> tuple[np.ndarray, float]:
    """Dispatches on hp.solver ('flip', 'exhaustive' or 'dcd')."""
    if hp.solver == "flip":
        return solve_flip_descent(inst, warm_start, hp.bqp_restarts, seed)
    elif hp.solver == "exhaustive":
        return solve_exhaustive(inst)
    elif hp.solver == "dcd":
        return solve_coordinate_descent(inst, warm_start)
    raise ValueError(f"Invalid input: solver = {hp.solver}.")
