from dataclasses import dataclass, asdict, replace as dc_replace
from typing import Literal
import numpy as np


MAX_GAMMA = float(np.tan(np.deg2rad(60.0)))
"""Largest admissible scale-invariant margin, tan(60 degrees) ~ 1.7321."""

SOLVERS = ("flip", "exhaustive", "dcd")


@dataclass(frozen=True)
class Hyperparams:
    """Validated hyperparameters shared by every trainer.

    Attributes
    ----------
    dim : int
        Default: 20. Code / embedding dimension d.

    gamma : float
        Default: 1.0. Scale-invariant margin tan(beta), in (0, tan 60deg].

    lam : float
        Default: 1.0. Weight of the margin term against the pairwise term.

    cml_margin : float
        Default: 0.5. Fixed margin m of the CML-style baseline.

    n_neg : int
        Default: 5. Negatives per positive in N-pair batches.

    learning_rate : float
        Default: 0.05. Step size of the continuous trainers.

    epochs : int
        Default: 20. Passes over the users for the continuous trainers.

    batch_users : int
        Default: 16. Users per mini-batch of the continuous trainers.

    bqp_restarts : int
        Default: 8. Trajectories of the flip-descent solver.

    seed : int
        Default: 42.

    max_iters : int
        Default: 30. Outer iterations of the discrete trainer.

    tol : float
        Default: 1e-4. Relative bound decrease below which the discrete
        trainer stops. float('inf') runs exactly one outer iteration.
        The continuous trainers use it only to set the converged flag.

    solver : Literal['flip', 'exhaustive', 'dcd']
        Default: 'flip'.

    clip_norm : bool
        Default: True. Clip embedding rows at norm sqrt(dim).

    init_scale : float
        Default: 0.1. Standard deviation of the embedding initialization.

    resample_negatives : bool
        Default: True. Redraw negatives at every outer iteration.

    bpr_reg : float
        Default: 1e-4. L2 weight of the BPR-style baseline.
    """

    dim: int = 20
    gamma: float = 1.0
    lam: float = 1.0
    cml_margin: float = 0.5
    n_neg: int = 5
    learning_rate: float = 0.05
    epochs: int = 20
    batch_users: int = 16
    bqp_restarts: int = 8
    seed: int = 42
    max_iters: int = 30
    tol: float = 1e-4
    solver: Literal["flip", "exhaustive", "dcd"] = "flip"
    clip_norm: bool = True
    init_scale: float = 0.1
    resample_negatives: bool = True
    bpr_reg: float = 1e-4

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"Invalid input: dim = {self.dim}. Must be >= 1.")
        if not 0.0 < self.gamma <= MAX_GAMMA + 1e-12:
            raise ValueError(
                f"Invalid input: gamma = {self.gamma}. Must lie in "
                f"(0, {MAX_GAMMA:.4f}] (tan 60 degrees)."
            )
        if not (np.isfinite(self.lam) and self.lam >= 0):
            raise ValueError(f"Invalid input: lam = {self.lam}. Must be >= 0.")
        if self.cml_margin < 0:
            raise ValueError(f"Invalid input: cml_margin = {self.cml_margin}.")
        if self.n_neg < 1:
            raise ValueError(f"Invalid input: n_neg = {self.n_neg}. Must be >= 1.")
        if not self.learning_rate > 0:
            raise ValueError(f"Invalid input: learning_rate = {self.learning_rate}.")
        if self.epochs < 0:
            raise ValueError(f"Invalid input: epochs = {self.epochs}.")
        if self.batch_users < 1:
            raise ValueError(f"Invalid input: batch_users = {self.batch_users}.")
        if self.bqp_restarts < 1:
            raise ValueError(f"Invalid input: bqp_restarts = {self.bqp_restarts}.")
        if self.seed < 0:
            raise ValueError(f"Invalid input: seed = {self.seed}. Must be >= 0.")
        if self.max_iters < 1:
            raise ValueError(f"Invalid input: max_iters = {self.max_iters}.")
        if not self.tol >= 0:
            raise ValueError(f"Invalid input: tol = {self.tol}.")
        if self.solver not in SOLVERS:
            raise ValueError(
                f"Invalid input: solver = {self.solver}. Must be one of {SOLVERS}."
            )
        if not self.init_scale > 0:
            raise ValueError(f"Invalid input: init_scale = {self.init_scale}.")
        if self.bpr_reg < 0:
            raise ValueError(f"Invalid input: bpr_reg = {self.bpr_reg}.")

    def replace(self, **changes) -> "Hyperparams":
        """Returns a validated copy with the given fields changed."""
        return dc_replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)
