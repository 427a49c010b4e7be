"""
Command-line entry point.

Every sub-command writes machine-readable results as one JSON object per
line on stdout; human summaries go to stderr. Exit codes: 0 success,
2 usage error, 3 data error, 4 numerical failure.
"""

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence
import numpy as np

from .._src.codes.binary import BinaryCodeMatrix
from .._src.data.interactions import (
    filter_min_degree,
    load_interactions,
    load_split,
    split_train_test,
    write_interactions,
)
from .._src.display.compute_options import THREADS_ENV_VAR, compute_options
from .._src.display.print_options import print_options
from .._src.display.print_utils import print_wrapped
from .._src.experiments.grid import run_grid
from .._src.experiments.rq4 import run_rq4
from .._src.metrics.ranking import evaluate_model
from .._src.objective.hyperparams import MAX_GAMMA, SOLVERS, Hyperparams
from .._src.retrieval.benchmark import benchmark_speedup
from .._src.retrieval.index import RetrievalIndex, top_k
from .._src.trainer.modes import MODES, train_model
from .._src.trainer.report import load_checkpoint, save_checkpoint
from .._src.utils.errors import (
    CodeFileError,
    DataError,
    DimensionMismatchError,
    NumericalError,
)
from .._src.utils.serialize import to_json_line


EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4

TRAIN_FILE = "train.tsv"
TEST_FILE = "test.tsv"


class UsageError(ValueError):
    """Raised when a command's configuration is rejected before work starts."""


@dataclass
class RunConfig:
    """Validated configuration of one CLI invocation."""

    command: str
    hp: Hyperparams
    data: Path | None = None
    out: Path | None = None
    model: Path | None = None
    sep: str = "\t"
    threshold: float = 1.0
    min_degree: int = 20
    train_frac: float = 0.8
    mode: str = "dsiml"
    k: int = 10
    ks: list[int] = field(default_factory=lambda: [10])
    users: list[str] | None = None
    m: int = 100_000
    queries: int = 100
    gammas: list[float] = field(default_factory=list)
    lambdas: list[float] = field(default_factory=list)
    seeds: list[int] = field(default_factory=list)
    verbose: bool = False

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        """Builds and validates a RunConfig; raises UsageError on any
        invalid flag or missing input path."""
        try:
            hp = _hyperparams(args)
        except ValueError as e:
            raise UsageError(str(e))
        config = cls(
            command=args.command,
            hp=hp,
            data=_path_or_none(getattr(args, "data", None)),
            out=_path_or_none(getattr(args, "out", None)),
            model=_path_or_none(getattr(args, "model", None)),
            sep=_decode_separator(getattr(args, "sep", "\t")),
            threshold=getattr(args, "threshold", 1.0),
            min_degree=getattr(args, "min_degree", 20),
            train_frac=getattr(args, "train_frac", 0.8),
            mode=getattr(args, "mode", "dsiml"),
            k=getattr(args, "k", 10),
            ks=list(getattr(args, "ks", None) or [getattr(args, "k", 10)]),
            users=getattr(args, "users", None),
            m=getattr(args, "m", 100_000),
            queries=getattr(args, "queries", 100),
            gammas=list(getattr(args, "gammas", None) or [hp.gamma]),
            lambdas=list(getattr(args, "lambdas", None) or [hp.lam]),
            seeds=list(getattr(args, "seeds", None) or [hp.seed]),
            verbose=args.verbose,
        )
        config.validate()
        return config

    def validate(self):
        if self.command == "prepare":
            if self.data is None or not self.data.is_file():
                raise UsageError(f"Input file not found: {self.data}.")
            if self.out is None:
                raise UsageError("prepare requires --out.")
            if self.min_degree < 0:
                raise UsageError(f"Invalid input: --min-degree = {self.min_degree}.")
            if not 0.0 < self.train_frac < 1.0:
                raise UsageError(f"Invalid input: --train-frac = {self.train_frac}.")
        if self.command in ("train", "eval", "recommend", "grid"):
            if self.data is None or not self.data.is_dir():
                raise UsageError(f"Dataset directory not found: {self.data}.")
            for name in (TRAIN_FILE, TEST_FILE):
                if not (self.data / name).is_file():
                    raise UsageError(f"Dataset file not found: {self.data / name}.")
        if self.command == "train" and self.out is None:
            raise UsageError("train requires --out.")
        if self.command in ("eval", "recommend"):
            if self.model is None or not self.model.is_dir():
                raise UsageError(f"Model directory not found: {self.model}.")
        if self.k < 1 or any(k < 1 for k in self.ks):
            raise UsageError("Every k must be >= 1.")
        if self.m < 1 or self.queries < 1:
            raise UsageError("--m and --queries must be >= 1.")
        for g in self.gammas:
            if not 0.0 < g <= MAX_GAMMA + 1e-12:
                raise UsageError(
                    f"Invalid input: gamma = {g}. Must lie in (0, {MAX_GAMMA:.4f}]."
                )
        if self.command == "grid":
            for v in self.lambdas:
                if not v > 0:
                    raise UsageError(
                        f"Invalid input: lambda = {v}. Grid values must be > 0."
                    )


def _path_or_none(value) -> Path | None:
    return None if value is None else Path(value)


def _decode_separator(sep: str) -> str:
    return {"\\t": "\t", "tab": "\t", "comma": ","}.get(sep, sep)


def _hyperparams(args: argparse.Namespace) -> Hyperparams:
    defaults = Hyperparams()
    return Hyperparams(
        dim=getattr(args, "dim", defaults.dim),
        gamma=getattr(args, "gamma", defaults.gamma),
        lam=getattr(args, "lam", defaults.lam),
        cml_margin=getattr(args, "cml_margin", defaults.cml_margin),
        n_neg=getattr(args, "neg", defaults.n_neg),
        learning_rate=getattr(args, "lr", defaults.learning_rate),
        epochs=getattr(args, "epochs", defaults.epochs),
        batch_users=getattr(args, "batch_users", defaults.batch_users),
        bqp_restarts=getattr(args, "restarts", defaults.bqp_restarts),
        seed=args.seed,
        max_iters=getattr(args, "iters", defaults.max_iters),
        tol=getattr(args, "tol", defaults.tol),
        solver=getattr(args, "solver", defaults.solver),
    )


def _emit(line: str):
    sys.stdout.write(line + "\n")
    sys.stdout.flush()


def _summary(text: str):
    print_options._log_info(text)


# ------------------------------------------------------------------------------
# COMMANDS
# ------------------------------------------------------------------------------
def cmd_prepare(config: RunConfig) -> int:
    """Loads, filters (unless --min-degree 0), splits and writes
    train.tsv / test.tsv into --out."""
    data = load_interactions(
        config.data, config.sep, config.threshold, verbose=config.verbose
    )
    if config.min_degree > 0:
        data = filter_min_degree(data, config.min_degree, verbose=config.verbose)
    data = split_train_test(data, config.train_frac, config.hp.seed)
    config.out.mkdir(parents=True, exist_ok=True)
    write_interactions(data, config.out / TRAIN_FILE, "train", config.sep)
    write_interactions(data, config.out / TEST_FILE, "test", config.sep)
    n_test = len(data.pairs("test")[0])
    _emit(
        to_json_line(
            {
                "command": "prepare",
                "users": data.n_users,
                "items": data.n_items,
                "train": data.n_interactions - n_test,
                "test": n_test,
                "out": str(config.out),
            }
        )
    )
    print_wrapped(f"Wrote {data} to '{config.out}'.", type="UPDATE")
    return EXIT_OK


def _load_dataset(config: RunConfig):
    return load_split(
        config.data / TRAIN_FILE,
        config.data / TEST_FILE,
        config.sep,
        name=config.data.name,
    )


def cmd_train(config: RunConfig) -> int:
    """Trains --mode and writes the model directory --out."""
    data = _load_dataset(config)
    trained = train_model(data, config.hp, config.mode, verbose=config.verbose)
    save_checkpoint(
        config.out,
        user_embeddings=trained.user_embeddings,
        item_embeddings=trained.item_embeddings,
        user_codes=trained.user_codes,
        item_codes=trained.item_codes,
        reports=trained.reports,
        metadata={"mode": config.mode, "hyperparams": config.hp.to_dict()},
    )
    for report in trained.reports:
        for line in report.to_json_lines():
            _emit(line)
        _summary(str(report))
    return EXIT_OK


def _load_model(config: RunConfig, data) -> tuple:
    parts = load_checkpoint(config.model)
    mode = parts.get("metadata", {}).get("mode")
    if "user_codes" in parts and "item_codes" in parts:
        user_repr, item_repr, metric = parts["user_codes"], parts["item_codes"], None
    elif "user_embeddings" in parts and "item_embeddings" in parts:
        user_repr, item_repr = parts["user_embeddings"], parts["item_embeddings"]
        metric = "euclidean" if mode == "cml" else "inner"
    else:
        raise CodeFileError(f"No complete model found in '{config.model}'.")
    if user_repr.rows != data.n_users or item_repr.rows != data.n_items:
        raise DimensionMismatchError(
            f"Model covers {user_repr.rows} users / {item_repr.rows} items, data has "
            f"{data.n_users} / {data.n_items}."
        )
    seed = parts.get("metadata", {}).get("hyperparams", {}).get("seed")
    return user_repr, item_repr, metric, mode or "unknown", seed


def cmd_eval(config: RunConfig) -> int:
    """Evaluates the model directory --model on the test split of --data."""
    data = _load_dataset(config)
    user_repr, item_repr, metric, mode, seed = _load_model(config, data)
    metrics = evaluate_model(
        user_repr, item_repr, data, config.ks, metric, verbose=config.verbose
    )
    for line in metrics.to_json_lines(mode, seed=seed):
        _emit(line)
    _summary(str(metrics))
    return EXIT_OK


def cmd_recommend(config: RunConfig) -> int:
    """Emits the top --k unseen items of each listed user (all users when
    --users is omitted)."""
    data = _load_dataset(config)
    user_repr, item_repr, metric, _, _ = _load_model(config, data)
    key_to_id = {key: u for u, key in enumerate(data.user_keys)}
    if config.users is None:
        users = list(range(data.n_users))
    else:
        unknown = [key for key in config.users if key not in key_to_id]
        if unknown:
            raise DataError(f"Unknown user key(s): {', '.join(unknown)}.")
        users = [key_to_id[key] for key in config.users]

    if isinstance(user_repr, BinaryCodeMatrix):
        index = RetrievalIndex.build(item_repr, data)
        for u in users:
            ranked = top_k(index, user_repr.row(u), config.k, exclude_user=u)
            _emit(
                to_json_line(
                    {
                        "user": data.user_keys[u],
                        "items": [data.item_keys[i] for i, _ in ranked],
                        "distances": [h for _, h in ranked],
                    }
                )
            )
        return EXIT_OK

    U, V = user_repr.values, item_repr.values
    for u in users:
        if metric == "euclidean":
            diff = V - U[u]
            scores = -np.einsum("mk,mk->m", diff, diff)
        else:
            scores = V @ U[u]
        seen = data.train_positives(u)
        scores[seen] = -np.inf
        order = np.argsort(-scores, kind="stable")[: min(config.k, len(V) - len(seen))]
        _emit(
            to_json_line(
                {
                    "user": data.user_keys[u],
                    "items": [data.item_keys[i] for i in order],
                    "scores": scores[order],
                }
            )
        )
    return EXIT_OK


def cmd_bench(config: RunConfig) -> int:
    """Measures packed-Hamming vs float full-ranking throughput."""
    report = benchmark_speedup(
        config.m, config.hp.dim, config.queries, config.hp.seed, config.verbose
    )
    _emit(report.to_json_line())
    _summary(str(report))
    return EXIT_OK


def cmd_grid(config: RunConfig) -> int:
    """Sweeps gamma x lambda x seed, emitting each cell's lines as it ends."""
    data = _load_dataset(config)

    def flush(rows: list[dict]):
        for row in rows:
            _emit(to_json_line(row))

    report = run_grid(
        data,
        config.hp,
        config.gammas,
        config.lambdas,
        config.seeds,
        mode=config.mode,
        ks=config.ks,
        on_cell=flush,
        verbose=config.verbose,
    )
    _summary(str(report))
    return EXIT_OK


def cmd_rq4(config: RunConfig) -> int:
    """Scale-invariant vs fixed-margin comparison on synthetic data."""
    report = run_rq4(config.seeds, config.hp, k=config.k, verbose=config.verbose)
    for line in report.to_json_lines():
        _emit(line)
    _summary(str(report))
    return EXIT_OK


COMMANDS = {
    "prepare": cmd_prepare,
    "train": cmd_train,
    "eval": cmd_eval,
    "recommend": cmd_recommend,
    "bench": cmd_bench,
    "grid": cmd_grid,
    "rq4": cmd_rq4,
}


# ------------------------------------------------------------------------------
# PARSER
# ------------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    """Builds the argument parser with one sub-parser per command."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="Random seed.")
    common.add_argument(
        "--threads",
        type=int,
        default=None,
        help=f"Worker threads (default: ${THREADS_ENV_VAR}, else 1).",
    )
    common.add_argument(
        "-v", "--verbose", action="store_true", help="Print progress to stderr."
    )

    data_flags = argparse.ArgumentParser(add_help=False)
    data_flags.add_argument("--data", required=True, help="Dataset directory.")
    data_flags.add_argument("--sep", default="\t", help="Field separator.")

    hp_flags = argparse.ArgumentParser(add_help=False)
    hp_flags.add_argument("--dim", type=int, default=20, help="Code dimension d.")
    hp_flags.add_argument("--gamma", type=float, default=1.0, help="Margin tan(beta).")
    hp_flags.add_argument(
        "--lambda", dest="lam", type=float, default=1.0, help="Margin-term weight."
    )
    hp_flags.add_argument("--neg", type=int, default=5, help="Negatives per positive.")
    hp_flags.add_argument("--epochs", type=int, default=20, help="Continuous epochs.")
    hp_flags.add_argument("--lr", type=float, default=0.05, help="Learning rate.")
    hp_flags.add_argument(
        "--batch-users", type=int, default=16, help="Users per mini-batch."
    )
    hp_flags.add_argument(
        "--cml-margin", type=float, default=0.5, help="Fixed margin of CML."
    )
    hp_flags.add_argument("--iters", type=int, default=30, help="Outer iterations.")
    hp_flags.add_argument("--tol", type=float, default=1e-4, help="Relative tolerance.")
    hp_flags.add_argument("--restarts", type=int, default=8, help="Solver restarts.")
    hp_flags.add_argument("--solver", choices=SOLVERS, default="flip")
    hp_flags.add_argument("--mode", choices=MODES, default="dsiml")

    parser = argparse.ArgumentParser(
        prog="dsiml",
        description="Binary-code recommendation with scale-invariant margins.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    prepare = sub.add_parser(
        "prepare", parents=[common], help="Filter and split an interaction log."
    )
    prepare.add_argument("--data", required=True, help="Interaction file.")
    prepare.add_argument("--sep", default="\t", help="Field separator.")
    prepare.add_argument(
        "--threshold", type=float, default=1.0, help="Minimum positive rating."
    )
    prepare.add_argument(
        "--min-degree", type=int, default=20, help="Degree filter (0 disables)."
    )
    prepare.add_argument("--train-frac", type=float, default=0.8)
    prepare.add_argument("--out", required=True, help="Output directory.")

    train = sub.add_parser(
        "train", parents=[common, data_flags, hp_flags], help="Train a model."
    )
    train.add_argument("--out", required=True, help="Model directory.")

    evaluate = sub.add_parser(
        "eval", parents=[common, data_flags], help="Evaluate a model."
    )
    evaluate.add_argument("--model", required=True, help="Model directory.")
    evaluate.add_argument("--ks", type=int, nargs="+", default=[10, 50, 100])

    recommend = sub.add_parser(
        "recommend", parents=[common, data_flags], help="Top-k recommendations."
    )
    recommend.add_argument("--model", required=True, help="Model directory.")
    recommend.add_argument("--k", type=int, default=10)
    recommend.add_argument("--users", nargs="+", default=None, help="User keys.")

    bench = sub.add_parser("bench", parents=[common], help="Retrieval speedup.")
    bench.add_argument("--m", type=int, default=100_000, help="Number of items.")
    bench.add_argument("--dim", type=int, default=64, help="Code dimension d.")
    bench.add_argument("--queries", type=int, default=100)

    grid = sub.add_parser(
        "grid", parents=[common, data_flags, hp_flags], help="gamma x lambda sweep."
    )
    grid.add_argument("--gammas", type=float, nargs="+", default=None)
    grid.add_argument("--lambdas", type=float, nargs="+", default=None)
    grid.add_argument("--seeds", type=int, nargs="+", default=None)
    grid.add_argument("--ks", type=int, nargs="+", default=[10])

    rq4 = sub.add_parser(
        "rq4", parents=[common, hp_flags], help="Imbalanced-spread synthetic study."
    )
    rq4.add_argument("--seeds", type=int, nargs="+", default=list(range(10)))
    rq4.add_argument("--k", type=int, default=10)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Runs the CLI and returns its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        compute_options.set_n_threads(args.threads)
        config = RunConfig.from_args(args)
        return COMMANDS[config.command](config)
    except UsageError as e:
        print_wrapped(str(e), type="WARNING")
        return EXIT_USAGE
    except (DataError, CodeFileError, DimensionMismatchError) as e:
        print_wrapped(f"{type(e).__name__}: {e}", type="WARNING")
        return EXIT_DATA
    except NumericalError as e:
        print_wrapped(f"{type(e).__name__}: {e}", type="WARNING")
        return EXIT_NUMERICAL
    except ValueError as e:
        print_wrapped(str(e), type="WARNING")
        return EXIT_USAGE
