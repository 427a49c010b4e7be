import json
from pathlib import Path
import numpy as np
import pandas as pd
import matplotlib.pyplot as plt
import seaborn as sns
from ..codes.binary import BinaryCodeMatrix
from ..codes.embedding import EmbeddingMatrix
from ..codes.fileio import serialize, deserialize, save_embeddings, load_embeddings
from ..display.plot_options import plot_options
from ..display.print_utils import (
    bold_text,
    color_text,
    format_two_column,
    format_value,
    framed,
)
from ..utils.serialize import prepare_for_json, to_json_line


USER_EMBEDDINGS_FILE = "user_embeddings.dsmr"
ITEM_EMBEDDINGS_FILE = "item_embeddings.dsmr"
USER_CODES_FILE = "user_codes.dsml"
ITEM_CODES_FILE = "item_codes.dsml"
REPORT_FILE = "report.jsonl"
METADATA_FILE = "model.json"


class TrainReport:
    """Trajectory of one training run.

    Each record is one sub-step: 'init' and 'epoch' for the continuous
    trainers; 'refresh_users', 'user_codes', 'refresh_items' and
    'item_codes' for the discrete trainer. Continuous records carry no
    bound value.
    """

    def __init__(self, model: str, hyperparams: dict | None = None):
        self._model = model
        self._hyperparams = {} if hyperparams is None else dict(hyperparams)
        self._records: list[dict] = []
        self._converged = False
        self._checksums: dict[str, str] = {}

    def record(
        self,
        iteration: int,
        step: str,
        objective: float,
        bound: float | None = None,
        elapsed: float = 0.0,
    ):
        """Appends one sub-step record."""
        self._records.append(
            {
                "iteration": int(iteration),
                "step": step,
                "bound": np.nan if bound is None else float(bound),
                "objective": float(objective),
                "elapsed": float(elapsed),
            }
        )

    def mark_converged(self, converged: bool = True):
        self._converged = converged

    def set_checksums(self, **checksums: str):
        self._checksums.update(checksums)

    # --------------------------------------------------------------------------
    # GETTERS
    # --------------------------------------------------------------------------
    @property
    def model(self) -> str:
        return self._model

    @property
    def converged(self) -> bool:
        return self._converged

    @property
    def checksums(self) -> dict[str, str]:
        return dict(self._checksums)

    @property
    def records(self) -> list[dict]:
        return [dict(r) for r in self._records]

    @property
    def n_iterations(self) -> int:
        if not self._records:
            return 0
        return max(r["iteration"] for r in self._records)

    def bound_trajectory(self) -> np.ndarray:
        return np.array([r["bound"] for r in self._records])

    def objective_trajectory(self) -> np.ndarray:
        return np.array([r["objective"] for r in self._records])

    def final_objective(self) -> float:
        return self._records[-1]["objective"] if self._records else np.nan

    def final_bound(self) -> float:
        return self._records[-1]["bound"] if self._records else np.nan

    def is_monotone(self, slack: float = 1e-6) -> bool:
        """Whether the recorded bound never increases by more than slack.
        Continuous reports are checked on their objective instead."""
        values = self.bound_trajectory()
        if values.size == 0 or np.all(np.isnan(values)):
            values = self.objective_trajectory()
        return bool(np.all(np.diff(values) <= slack))

    def to_dataframe(self) -> pd.DataFrame:
        """Returns the records as a DataFrame, one row per sub-step."""
        return pd.DataFrame(
            self._records,
            columns=["iteration", "step", "bound", "objective", "elapsed"],
        )

    def _to_dict(self) -> dict:
        return {
            "model": self._model,
            "converged": self._converged,
            "iterations": self.n_iterations,
            "final_objective": self.final_objective(),
            "final_bound": self.final_bound(),
            "checksums": self.checksums,
            "hyperparams": self._hyperparams,
        }

    def to_json_lines(self) -> list[str]:
        """One JSON line per record, then one summary line."""
        lines = [
            to_json_line({"model": self._model, "type": "step", **r})
            for r in self._records
        ]
        lines.append(to_json_line({"type": "summary", **self._to_dict()}))
        return lines

    def plot_trajectory(
        self, figsize: tuple[float, float] = (5, 3), ax: plt.Axes | None = None
    ) -> plt.Figure:
        """Plots the objective (and, when present, the bound) per sub-step.

        Parameters
        ----------
        figsize : tuple[float, float]
            Default: (5, 3).

        ax : plt.Axes | None
            Default: None. If None, a new figure is created.

        Returns
        -------
        plt.Figure
        """
        fig = None
        if ax is None:
            fig, ax = plt.subplots(figsize=figsize)
        df = self.to_dataframe().reset_index(names="substep")
        palette = plot_options._color_palette
        sns.lineplot(
            data=df,
            x="substep",
            y="objective",
            marker="o",
            markersize=plot_options._marker_size,
            linewidth=plot_options._line_width,
            color=palette[0],
            label="objective",
            ax=ax,
        )
        if not df["bound"].isna().all():
            sns.lineplot(
                data=df,
                x="substep",
                y="bound",
                marker="s",
                markersize=plot_options._marker_size,
                linewidth=plot_options._line_width,
                color=palette[1],
                label="bound",
                ax=ax,
            )
        ax.set_title(f"{self._model.upper()} training trajectory")
        ax.set_xlabel("Sub-step")
        ax.set_ylabel("Value")
        ax.title.set_fontsize(plot_options._title_font_size)
        ax.xaxis.label.set_fontsize(plot_options._axis_title_font_size)
        ax.yaxis.label.set_fontsize(plot_options._axis_title_font_size)
        if fig is not None:
            fig.tight_layout()
            plt.close()
        return fig if fig is not None else ax.figure

    def __str__(self) -> str:
        first = self._records[0] if self._records else None
        body = [
            format_two_column(
                bold_text("Model: ") + color_text(self._model, "blue"),
                bold_text("Converged: ")
                + color_text(
                    str(self._converged), "green" if self._converged else "red"
                ),
            ),
            format_two_column(
                bold_text("Iterations: ") + str(self.n_iterations),
                bold_text("Records: ") + str(len(self._records)),
            ),
            format_two_column(
                bold_text("Initial objective: ")
                + color_text(format_value(first and first["objective"]), "yellow"),
                bold_text("Final objective: ")
                + color_text(format_value(self.final_objective()), "yellow"),
            ),
        ]
        if not np.isnan(self.final_bound()):
            body.append(
                bold_text("Final bound: ")
                + color_text(format_value(self.final_bound()), "yellow")
            )
        for name, digest in self._checksums.items():
            body.append(bold_text(f"{name}: ") + color_text(digest, "purple"))
        return framed("Training Report", body)

    def _repr_pretty_(self, p, cycle):
        if cycle:
            p.text(self.__class__.__name__ + "(...)")
        else:
            p.text(str(self))


def save_checkpoint(
    directory: Path | str,
    user_embeddings: EmbeddingMatrix | None = None,
    item_embeddings: EmbeddingMatrix | None = None,
    user_codes: BinaryCodeMatrix | None = None,
    item_codes: BinaryCodeMatrix | None = None,
    reports: TrainReport | list[TrainReport] | None = None,
    metadata: dict | None = None,
) -> list[Path]:
    """Writes whichever model parts are given into a model directory.

    Parameters
    ----------
    directory : Path | str
        Created if missing.

    user_embeddings, item_embeddings : EmbeddingMatrix | None
        Written in the DSMR format.

    user_codes, item_codes : BinaryCodeMatrix | None
        Written in the DSML format.

    reports : TrainReport | list[TrainReport] | None
        Written as JSON lines to report.jsonl.

    metadata : dict | None
        Default: None. Written to model.json (e.g. the training mode).

    Returns
    -------
    list[Path]
        The files written.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for matrix, name in (
        (user_embeddings, USER_EMBEDDINGS_FILE),
        (item_embeddings, ITEM_EMBEDDINGS_FILE),
    ):
        if matrix is not None:
            save_embeddings(matrix, directory / name)
            written.append(directory / name)
    for matrix, name in ((user_codes, USER_CODES_FILE), (item_codes, ITEM_CODES_FILE)):
        if matrix is not None:
            serialize(matrix, directory / name)
            written.append(directory / name)
    if reports is not None:
        if isinstance(reports, TrainReport):
            reports = [reports]
        lines = [line for report in reports for line in report.to_json_lines()]
        (directory / REPORT_FILE).write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(directory / REPORT_FILE)
    if metadata is not None:
        (directory / METADATA_FILE).write_text(
            json.dumps(prepare_for_json(metadata), indent=2), encoding="utf-8"
        )
        written.append(directory / METADATA_FILE)
    return written


def load_checkpoint(directory: Path | str) -> dict:
    """Reads the model parts present in a model directory.

    Returns
    -------
    dict
        Keys among 'user_embeddings', 'item_embeddings', 'user_codes',
        'item_codes' and 'metadata'; missing files are absent from the dict.
    """
    directory = Path(directory)
    out = {}
    for key, name, reader in (
        ("user_embeddings", USER_EMBEDDINGS_FILE, load_embeddings),
        ("item_embeddings", ITEM_EMBEDDINGS_FILE, load_embeddings),
        ("user_codes", USER_CODES_FILE, deserialize),
        ("item_codes", ITEM_CODES_FILE, deserialize),
    ):
        if (directory / name).exists():
            out[key] = reader(directory / name)
    if (directory / METADATA_FILE).exists():
        out["metadata"] = json.loads((directory / METADATA_FILE).read_text("utf-8"))
    return out
