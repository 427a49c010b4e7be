from typing import Callable, Iterator, Literal, Sequence
import pandas as pd
import matplotlib.pyplot as plt
import seaborn as sns
from sklearn.model_selection import ParameterGrid
from ..data.interactions import InteractionSet
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


GRID_COLUMNS = ["model", "gamma", "lam", "seed", "k", "ndcg", "hr", "users"]


def iter_grid(
    data: InteractionSet,
    base_hp: Hyperparams,
    gammas: Sequence[float],
    lambdas: Sequence[float],
    seeds: Sequence[int],
    mode: Literal["siml", "dsiml", "cml", "bpr"] = "dsiml",
    ks: Sequence[int] = (10,),
    verbose: bool = False,
) -> Iterator[list[dict]]:
    """Yields the metric rows of each (gamma, lam, seed) cell as soon as the
    cell finishes. Cells follow ParameterGrid order: gamma outermost, seed
    innermost."""
    grid = ParameterGrid(
        {
            "gamma": [float(g) for g in gammas],
            "lam": [float(v) for v in lambdas],
            "seed": [int(s) for s in seeds],
        }
    )
    for n, cell in enumerate(grid, start=1):
        hp = base_hp.replace(**cell)
        trained = train_model(data, hp, mode=mode)
        metrics = evaluate_model(
            *trained.ranking_representation, data, ks=ks, metric=trained.metric
        )
        rows = metrics.to_records(mode, seed=hp.seed, gamma=hp.gamma, lam=hp.lam)
        if verbose:
            k = metrics.ks[0]
            print_wrapped(
                f"Grid cell {n}/{len(grid)} (gamma = {hp.gamma}, lam = {hp.lam}, "
                f"seed = {hp.seed}): NDCG@{k} {format_value(metrics.ndcg[k])}.",
                type="PROGRESS",
            )
        yield rows


class GridReport:
    """Metric rows of a gamma x lam x seed sweep."""

    def __init__(self, rows: list[dict]):
        self._rows = pd.DataFrame(rows, columns=GRID_COLUMNS)

    def to_dataframe(self) -> pd.DataFrame:
        return self._rows.copy()

    def to_json_lines(self) -> list[str]:
        return [to_json_line(r) for r in self._rows.to_dict(orient="records")]

    def aggregate(self, k: int | None = None) -> pd.DataFrame:
        """Seed-averaged NDCG and HR per (gamma, lam) at one k (the smallest
        when None)."""
        k = self._rows["k"].min() if k is None else k
        rows = self._rows[self._rows["k"] == k]
        return rows.groupby(["gamma", "lam"])[["ndcg", "hr"]].mean().reset_index()

    def best(self, k: int | None = None, metric: str = "ndcg") -> dict:
        """The (gamma, lam) cell with the highest seed-averaged metric."""
        agg = self.aggregate(k)
        return agg.loc[agg[metric].idxmax()].to_dict()

    def sensitivity(self, param: Literal["gamma", "lam"], k: int | None = None):
        """Seed- and other-parameter-averaged metrics as a function of one
        parameter."""
        return self.aggregate(k).groupby(param)[["ndcg", "hr"]].mean()

    def plot_sensitivity(
        self,
        param: Literal["gamma", "lam"] = "gamma",
        k: int | None = None,
        figsize: tuple[float, float] = (5, 3),
        ax: plt.Axes | None = None,
    ) -> plt.Figure:
        """Line plot of NDCG@k and HR@k against gamma or lam."""
        fig = None
        if ax is None:
            fig, ax = plt.subplots(figsize=figsize)
        df = self.sensitivity(param, k).reset_index()
        palette = plot_options._color_palette
        for n, metric in enumerate(["ndcg", "hr"]):
            sns.lineplot(
                data=df,
                x=param,
                y=metric,
                marker="o",
                markersize=plot_options._marker_size,
                linewidth=plot_options._line_width,
                color=palette[n],
                label=metric.upper(),
                ax=ax,
            )
        if param == "lam":
            ax.set_xscale("log")
        ax.set_title(f"Sensitivity to {param}")
        ax.set_xlabel(param)
        ax.set_ylabel("Metric")
        ax.title.set_fontsize(plot_options._title_font_size)
        ax.xaxis.label.set_fontsize(plot_options._axis_title_font_size)
        ax.yaxis.label.set_fontsize(plot_options._axis_title_font_size)
        if fig is not None:
            fig.tight_layout()
            plt.close()
        return fig if fig is not None else ax.figure

    def __str__(self) -> str:
        if self._rows.empty:
            return framed("Hyperparameter Grid", ["No cells evaluated."])
        best = self.best()
        body = [
            bold_text("Cells: ")
            + str(len(self._rows.groupby(["gamma", "lam", "seed"]))),
            bold_text("Best (gamma, lam): ")
            + color_text(f"({best['gamma']}, {best['lam']})", "blue")
            + " NDCG "
            + color_text(format_value(best["ndcg"]), "yellow"),
        ]
        return framed("Hyperparameter Grid", body)

    def _repr_pretty_(self, p, cycle):
        if cycle:
            p.text(self.__class__.__name__ + "(...)")
        else:
            p.text(str(self))


def run_grid(
    data: InteractionSet,
    base_hp: Hyperparams,
    gammas: Sequence[float],
    lambdas: Sequence[float],
    seeds: Sequence[int],
    mode: Literal["siml", "dsiml", "cml", "bpr"] = "dsiml",
    ks: Sequence[int] = (10,),
    on_cell: Callable[[list[dict]], None] | None = None,
    verbose: bool = False,
) -> GridReport:
    """Runs the full gamma x lam x seed sweep.

    Parameters
    ----------
    data : InteractionSet

    base_hp : Hyperparams
        Every other hyperparameter is taken from here.

    gammas, lambdas : Sequence[float]
        Invalid values are rejected by Hyperparams validation.

    seeds : Sequence[int]

    mode : Literal['siml', 'dsiml', 'cml', 'bpr']
        Default: 'dsiml'.

    ks : Sequence[int]
        Default: (10,).

    on_cell : Callable[[list[dict]], None] | None
        Default: None. Called with each cell's rows as soon as it finishes.

    verbose : bool
        Default: False.

    Returns
    -------
    GridReport
    """
    # reject invalid grid values before any cell runs
    for g in gammas:
        base_hp.replace(gamma=float(g))
    for v in lambdas:
        base_hp.replace(lam=float(v))
    rows = []
    for cell_rows in iter_grid(
        data, base_hp, gammas, lambdas, seeds, mode, ks, verbose
    ):
        rows.extend(cell_rows)
        if on_cell is not None:
            on_cell(cell_rows)
    return GridReport(rows)
