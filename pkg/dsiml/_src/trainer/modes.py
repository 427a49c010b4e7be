from dataclasses import dataclass
from typing import Literal
from .continuous import train_siml, train_cml, train_bpr
from .discrete import train_dsiml
from .report import TrainReport
from ..codes.binary import BinaryCodeMatrix
from ..codes.embedding import EmbeddingMatrix
from ..data.interactions import InteractionSet
from ..objective.hyperparams import Hyperparams


MODES = ("siml", "dsiml", "cml", "bpr")


@dataclass
class TrainedModel:
    """Output of train_model. Codes are present only for 'dsiml'; the
    embeddings of 'dsiml' are those of the continuous warm start."""

    mode: str
    user_embeddings: EmbeddingMatrix | None
    item_embeddings: EmbeddingMatrix | None
    user_codes: BinaryCodeMatrix | None
    item_codes: BinaryCodeMatrix | None
    reports: list[TrainReport]

    @property
    def metric(self) -> Literal["hamming", "inner", "euclidean"]:
        """How this model ranks items."""
        if self.mode == "dsiml":
            return "hamming"
        return "euclidean" if self.mode == "cml" else "inner"

    @property
    def ranking_representation(self) -> tuple:
        """The (user, item) pair used for ranking."""
        if self.mode == "dsiml":
            return self.user_codes, self.item_codes
        return self.user_embeddings, self.item_embeddings


def train_model(
    data: InteractionSet,
    hp: Hyperparams,
    mode: Literal["siml", "dsiml", "cml", "bpr"] = "dsiml",
    verbose: bool = False,
) -> TrainedModel:
    """Trains one model by name.

    'dsiml' runs train_siml, then train_dsiml from the sign of its
    embeddings; both reports are kept.
    """
    if mode == "siml":
        U, V, report = train_siml(data, hp, verbose)
        return TrainedModel(mode, U, V, None, None, [report])
    elif mode == "cml":
        U, V, report = train_cml(data, hp, verbose)
        return TrainedModel(mode, U, V, None, None, [report])
    elif mode == "bpr":
        U, V, report = train_bpr(data, hp, verbose)
        return TrainedModel(mode, U, V, None, None, [report])
    elif mode == "dsiml":
        U, V, siml_report = train_siml(data, hp, verbose)
        B, D, report = train_dsiml(data, hp, init=(U, V), verbose=verbose)
        return TrainedModel(mode, U, V, B, D, [siml_report, report])
    raise ValueError(f"Invalid input: mode = {mode}. Must be one of {MODES}.")
