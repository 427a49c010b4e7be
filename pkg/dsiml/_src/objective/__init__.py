from .hyperparams import Hyperparams, MAX_GAMMA, SOLVERS
from .losses import (
    softplus,
    pairwise_loss,
    scale_loss,
    predicted_rating,
    scale_hinge_argument,
    scale_hinge_loss,
    triplet_statistics,
    batch_statistics,
    dsiml_objective,
    siml_objective,
    cml_loss,
    cml_objective,
    bpr_loss,
    bpr_objective,
)
from .gradients import siml_gradients, cml_gradients, bpr_gradients


__all__ = [
    "Hyperparams",
    "MAX_GAMMA",
    "SOLVERS",
    "softplus",
    "pairwise_loss",
    "scale_loss",
    "predicted_rating",
    "scale_hinge_argument",
    "scale_hinge_loss",
    "triplet_statistics",
    "batch_statistics",
    "dsiml_objective",
    "siml_objective",
    "cml_loss",
    "cml_objective",
    "bpr_loss",
    "bpr_objective",
    "siml_gradients",
    "cml_gradients",
    "bpr_gradients",
]
