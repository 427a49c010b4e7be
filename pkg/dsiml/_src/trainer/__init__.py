from .report import TrainReport, save_checkpoint, load_checkpoint
from .continuous import train_siml, train_cml, train_bpr
from .discrete import train_dsiml
from .modes import MODES, TrainedModel, train_model


__all__ = [
    "TrainReport",
    "save_checkpoint",
    "load_checkpoint",
    "train_siml",
    "train_cml",
    "train_bpr",
    "train_dsiml",
    "MODES",
    "TrainedModel",
    "train_model",
]
