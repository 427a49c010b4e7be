from typing import Sequence
import numpy as np
import pandas as pd
import matplotlib.pyplot as plt
import seaborn as sns
from .synthetic import generate_imbalanced_synthetic
from ..display.plot_options import plot_options
from ..display.print_utils import (
    bold_text,
    color_text,
    format_value,
    framed,
    print_wrapped,
)
from ..metrics.ranking import evaluate_model
from ..objective.hyperparams import Hyperparams
from ..trainer.modes import train_model
from ..utils.serialize import to_json_line


IMBALANCED = "imbalanced"
BALANCED = "balanced"


class RQ4Report:
    """Paired scale-invariant vs fixed-margin results on synthetic data with
    imbalanced (and optionally balanced) intra-class spreads."""

    def __init__(self, rows: pd.DataFrame, k: int):
        self._rows = rows.reset_index(drop=True)
        self._k = k

    def to_dataframe(self) -> pd.DataFrame:
        """One row per (setting, seed, model) with columns 'ndcg' and 'hr'."""
        return self._rows.copy()

    def summary(self) -> pd.DataFrame:
        """Mean and standard deviation of NDCG@k and HR@k per setting and
        model."""
        return (
            self._rows.groupby(["setting", "model"])[["ndcg", "hr"]]
            .agg(["mean", "std"])
            .sort_index()
        )

    def mean_ndcg(self, setting: str, model: str) -> float:
        rows = self._rows[
            (self._rows["setting"] == setting) & (self._rows["model"] == model)
        ]
        return float(rows["ndcg"].mean())

    def relative_gap(self, setting: str = IMBALANCED, baseline: str = "cml") -> float:
        """(SIML mean NDCG - baseline mean NDCG) / baseline mean NDCG."""
        base = self.mean_ndcg(setting, baseline)
        return (self.mean_ndcg(setting, "siml") - base) / max(abs(base), 1e-12)

    def to_json_lines(self) -> list[str]:
        return [
            to_json_line({**row, "k": self._k})
            for row in self._rows.to_dict(orient="records")
        ]

    def plot_comparison(
        self, figsize: tuple[float, float] = (5, 3), ax: plt.Axes | None = None
    ) -> plt.Figure:
        """Bar plot of mean NDCG@k per setting and model, with seed spread."""
        fig = None
        if ax is None:
            fig, ax = plt.subplots(figsize=figsize)
        sns.barplot(
            data=self._rows,
            x="setting",
            y="ndcg",
            hue="model",
            palette=plot_options._color_palette,
            errorbar="sd",
            ax=ax,
        )
        ax.set_title(f"NDCG@{self._k} by margin type")
        ax.set_xlabel("Setting")
        ax.set_ylabel(f"NDCG@{self._k}")
        ax.title.set_fontsize(plot_options._title_font_size)
        ax.xaxis.label.set_fontsize(plot_options._axis_title_font_size)
        ax.yaxis.label.set_fontsize(plot_options._axis_title_font_size)
        if fig is not None:
            fig.tight_layout()
            plt.close()
        return fig if fig is not None else ax.figure

    def __str__(self) -> str:
        body = []
        for setting in self._rows["setting"].unique():
            body.append(bold_text(f"Setting: {setting}"))
            for model in self._rows["model"].unique():
                rows = self._rows[
                    (self._rows["setting"] == setting) & (self._rows["model"] == model)
                ]
                body.append(
                    f"  {model.upper():<6} NDCG@{self._k} "
                    + color_text(format_value(rows["ndcg"].mean()), "yellow")
                    + " +/- "
                    + format_value(rows["ndcg"].std())
                    + f"   HR@{self._k} "
                    + color_text(format_value(rows["hr"].mean()), "yellow")
                )
            if "cml" in set(self._rows["model"]):
                body.append(
                    "  Relative gap vs CML: "
                    + color_text(f"{100 * self.relative_gap(setting):+.1f}%", "green")
                )
        return framed("Scale-Invariant vs Fixed Margin", body)

    def _repr_pretty_(self, p, cycle):
        if cycle:
            p.text(self.__class__.__name__ + "(...)")
        else:
            p.text(str(self))


def run_rq4(
    seeds: Sequence[int],
    hp: Hyperparams | None = None,
    n_users: int = 200,
    n_major: int = 400,
    n_minor: int = 40,
    spread_major: float = 3.0,
    spread_minor: float = 0.5,
    k: int = 10,
    include_bpr: bool = False,
    balanced_control: bool = True,
    verbose: bool = False,
) -> RQ4Report:
    """Trains the continuous scale-invariant model and the fixed-margin
    baseline with the same budget on each seed's synthetic dataset and
    reports paired NDCG@k / HR@k.

    Parameters
    ----------
    seeds : Sequence[int]

    hp : Hyperparams | None
        Default: None. Shared budget; None uses Hyperparams() (gamma = 1,
        lam = 1). The seed field is replaced per run.

    n_users, n_major, n_minor, spread_major, spread_minor
        Synthetic geometry, see generate_imbalanced_synthetic.

    k : int
        Default: 10.

    include_bpr : bool
        Default: False. Also train the BPR-style baseline.

    balanced_control : bool
        Default: True. Repeat every run with spread_minor = spread_major.

    verbose : bool
        Default: False.

    Returns
    -------
    RQ4Report
    """
    hp = Hyperparams() if hp is None else hp
    models = ["siml", "cml"] + (["bpr"] if include_bpr else [])
    settings = [(IMBALANCED, spread_minor)]
    if balanced_control:
        settings.append((BALANCED, spread_major))

    rows = []
    for setting, minor_spread in settings:
        for seed in seeds:
            data, _ = generate_imbalanced_synthetic(
                n_users=n_users,
                n_major=n_major,
                n_minor=n_minor,
                spread_major=spread_major,
                spread_minor=minor_spread,
                seed=seed,
                allow_equal_spreads=setting == BALANCED,
            )
            run_hp = hp.replace(seed=int(seed))
            for model in models:
                trained = train_model(data, run_hp, mode=model)
                metrics = evaluate_model(
                    *trained.ranking_representation,
                    data,
                    ks=[k],
                    metric=trained.metric,
                )
                rows.append(
                    {
                        "setting": setting,
                        "seed": int(seed),
                        "model": model,
                        "ndcg": metrics.ndcg[k],
                        "hr": metrics.hr[k],
                        "users": metrics.n_users_evaluated,
                    }
                )
            if verbose:
                print_wrapped(
                    f"Margin study ({setting}) seed {seed}: "
                    + ", ".join(
                        f"{r['model']} NDCG@{k} {format_value(r['ndcg'])}"
                        for r in rows[-len(models) :]
                    )
                    + ".",
                    type="PROGRESS",
                )
    return RQ4Report(
        pd.DataFrame(
            rows, columns=["setting", "seed", "model", "ndcg", "hr", "users"]
        ).astype({"ndcg": np.float64, "hr": np.float64}),
        k,
    )
