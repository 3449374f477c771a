"""Command-line entry point: train, evaluate, predict, sweep, inspect."""
import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import persistence
from .benchmarks import BENCHMARKS, SELECTED_MODELS, load_benchmark
from .datasets import DatasetError, LabeledDataset, load_delimited, load_features, load_idx, load_idx_images, split
from .model import is_power_of_two
from .pipeline import config_for, train_model
from .sweep import MNIST_GRID, SweepGrid, pareto_frontier, run_sweep

HYPERPARAMETERS = ("bits_per_input", "inputs_per_filter", "entries", "hashes")
# --config files use the sweep results header
CONFIG_KEYS = {"t": "bits_per_input", "n": "inputs_per_filter", "entries": "entries", "k": "hashes", "seed": "seed"}


class CliError(Exception):
    pass


class UsageError(CliError):
    """Reported together with the subcommand's usage line."""


def positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def power_of_two(text: str) -> int:
    v = positive(text)
    if not is_power_of_two(v):
        raise argparse.ArgumentTypeError(f"must be a power of two, got {v}")
    return v


def non_negative(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {v}")
    return v


def _delimiter(args):
    d = args.delimiter
    if d in ("whitespace", " "):
        return None
    if d == "\\t":
        return "\t"
    return d


def _paths(args, paths, what):
    fmt = args.dataset_format
    want = 2 if fmt == "idx" else 1
    if len(paths) != want:
        shape = "IMAGES LABELS" if fmt == "idx" else "FILE"
        raise CliError(f"{what} takes {shape} for --dataset-format {fmt}")
    for p in paths:
        if not Path(p).exists():
            raise CliError(f"{what} file not found: {p}")
    return paths


def load_labeled(args, paths, what, label_names=None) -> LabeledDataset:
    paths = _paths(args, paths, what)
    if args.dataset_format == "idx":
        return load_idx(*paths)
    column = -1 if args.label_column is None else args.label_column
    return load_delimited(paths[0], _delimiter(args), column, label_names, args.header)


def _read_config(path):
    try:
        with open(path, newline="") as f:
            rows = list(csv.DictReader(f))
    except OSError as e:
        raise CliError(f"cannot read config {path}: {e.strerror}") from None
    if not rows:
        raise CliError(f"config {path} has no data row")
    out = {}
    for key, dest in CONFIG_KEYS.items():
        if rows[0].get(key) not in (None, ""):
            try:
                out[dest] = int(rows[0][key])
            except ValueError:
                raise CliError(f"config {path}: {key} is not an integer") from None
    return out


def _hyperparameters(args):
    """Explicit flags win over --config, which wins over --preset."""
    values = {}
    if getattr(args, "preset", None):
        p = SELECTED_MODELS[args.preset]
        values.update(bits_per_input=p.bits_per_input, inputs_per_filter=p.inputs_per_filter,
                      entries=p.entries_per_filter, hashes=p.hashes_per_filter)
    if getattr(args, "config", None):
        values.update(_read_config(args.config))
    for name in HYPERPARAMETERS + ("seed",):
        if getattr(args, name) is not None:
            values[name] = getattr(args, name)
    values.setdefault("seed", 0)
    missing = [n for n in HYPERPARAMETERS if n not in values]
    if missing:
        raise CliError("missing hyperparameters: " + ", ".join("--" + m.replace("_", "-") for m in missing))
    if not is_power_of_two(values["entries"]):
        raise CliError(f"entries must be a power of two, got {values['entries']}")
    return values


def _train_test(args, seed):
    if args.benchmark:
        return load_benchmark(args.benchmark, args.data_dir, split_seed=seed)
    if not args.train:
        raise UsageError("no dataset: give --train PATH or --benchmark NAME")
    train = load_labeled(args, args.train, "--train")
    if args.test:
        return train, load_labeled(args, args.test, "--test", train.label_names)
    return split(train, 1 - args.test_fraction, seed=seed)


def cmd_train(args) -> int:
    hp = _hyperparameters(args)
    if args.preset and not args.benchmark and not args.train:
        args.benchmark = SELECTED_MODELS[args.preset].dataset
    train, test = _train_test(args, hp["seed"])
    config = config_for(train, hp["bits_per_input"], hp["inputs_per_filter"], hp["entries"], hp["hashes"], hp["seed"])
    run = train_model(config, train)
    test_acc = run.model.evaluate(test.features, test.labels) if len(test) else float("nan")
    persistence.save(run.model, args.out)
    print(f"t={config.bits_per_input} n={config.inputs_per_filter} entries={config.entries_per_filter} "
          f"k={config.hashes_per_filter} seed={config.seed}")
    print(f"b={run.bleach}")
    print(f"val_acc={run.val_accuracy:.4f}")
    print(f"test_acc={test_acc:.4f} ({len(test)} samples)")
    print(f"size={persistence.format_kib(config.payload_bits)} KiB")
    print(f"model={args.out}")
    return 0


def cmd_evaluate(args) -> int:
    model = persistence.load(args.model)
    data = load_labeled(args, args.data, "--data", model.label_names)
    if data.feature_count != model.config.feature_count:
        raise CliError(f"model expects {model.config.feature_count} features, data has {data.feature_count}")
    if data.class_count > model.config.class_count:
        raise CliError(f"data has {data.class_count} classes, model has {model.config.class_count}")
    if len(data) == 0:
        raise CliError("no labeled samples to evaluate")
    pred = model.predict_batch(data.features)
    m = model.config.class_count
    confusion = np.zeros((m, m), dtype=np.int64)
    np.add.at(confusion, (data.labels, pred), 1)
    correct = int(np.trace(confusion))
    print(f"accuracy={correct / len(data):.4f} ({correct}/{len(data)})")
    print("confusion (rows true, columns predicted):")
    for row in confusion:
        print(" ".join(str(v) for v in row))
    return 0


def cmd_predict(args) -> int:
    model = persistence.load(args.model)
    if args.dataset_format == "idx":
        if len(args.data) not in (1, 2):
            raise CliError("--data takes IMAGES [LABELS] for --dataset-format idx")
        x = load_idx_images(args.data[0])
    else:
        (path,) = _paths(args, args.data, "--data")
        x = load_features(path, _delimiter(args), args.header, args.label_column)
    if len(x) == 0:
        return 0
    if x.shape[1] != model.config.feature_count:
        raise CliError(f"model expects {model.config.feature_count} features, data has {x.shape[1]}")
    for p in model.predict_batch(x):
        print(int(p))
    return 0


def cmd_sweep(args) -> int:
    axes = {}
    for name in HYPERPARAMETERS:
        value = getattr(args, name)
        if value is None and args.grid == "mnist":
            value = getattr(MNIST_GRID, name)
        axes[name] = value
    missing = [n for n, v in axes.items() if v is None]
    if missing:
        raise CliError("missing sweep axes: " + ", ".join("--" + m.replace("_", "-") for m in missing))
    name = args.benchmark or (Path(args.train[0]).stem if args.train else "data")
    grid = SweepGrid(tuple(axes["bits_per_input"]), tuple(axes["inputs_per_filter"]), tuple(axes["entries"]),
                     tuple(axes["hashes"]), seed=args.seed, dataset=name)
    train, test = _train_test(args, grid.seed)
    results = run_sweep(grid, train, test, args.workers, Path(args.out), record_time=not args.no_timing)
    failed = sum(not r.ok for r in results)
    print(f"{len(results)} results in {args.out} ({failed} failed)")
    print("frontier (size_kib test_acc t n entries k):")
    for r in pareto_frontier(results):
        print(f"{r.size_kib:g} {r.test_acc:.4f} {r.t} {r.n} {r.entries} {r.k}")
    return 0


def cmd_inspect(args) -> int:
    print(persistence.describe(persistence.load(args.model)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bthowen", description="Bloom-filter weightless neural networks.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--dataset-format", choices=("idx", "delimited"), default="delimited")
    data.add_argument("--delimiter", default=",", help="field separator; 'whitespace' splits on runs of blanks")
    data.add_argument("--header", action="store_true", help="first row of a delimited file is a header")
    data.add_argument("--label-column", type=int, default=None,
                      help="label column of a delimited file (default: last; predict: none)")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--train", nargs="+", metavar="PATH")
    source.add_argument("--test", nargs="+", metavar="PATH")
    source.add_argument("--test-fraction", type=float, default=1 / 3,
                        help="held-out share when no --test is given (default 1/3)")
    source.add_argument("--benchmark", choices=sorted(BENCHMARKS), help="load a prepared benchmark instead")
    source.add_argument("--data-dir", type=Path, help="benchmark data directory (default $BTHOWEN_DATA or ./data)")

    p = sub.add_parser("train", parents=[data, source], help="train, select b, binarize and save a model")
    p.add_argument("--bits-per-input", type=positive)
    p.add_argument("--inputs-per-filter", type=positive)
    p.add_argument("--entries", type=power_of_two)
    p.add_argument("--hashes", type=positive)
    p.add_argument("--seed", type=non_negative)
    p.add_argument("--preset", choices=sorted(SELECTED_MODELS), help="hyperparameters of a published model")
    p.add_argument("--config", help="delimited file with a sweep-results header; its first row sets defaults")
    p.add_argument("--out", required=True, help="model file to write")
    p.set_defaults(func=cmd_train, usage=p)

    p = sub.add_parser("evaluate", parents=[data], help="accuracy of a saved model on labeled data")
    p.add_argument("--model", required=True)
    p.add_argument("--data", nargs="+", required=True, metavar="PATH")
    p.set_defaults(func=cmd_evaluate, usage=p)

    p = sub.add_parser("predict", parents=[data], help="print the predicted class index of each row")
    p.add_argument("--model", required=True)
    p.add_argument("--data", nargs="+", required=True, metavar="PATH")
    p.set_defaults(func=cmd_predict, usage=p)

    p = sub.add_parser("sweep", parents=[data, source], help="train and evaluate a hyperparameter grid")
    p.add_argument("--bits-per-input", type=positive, nargs="+")
    p.add_argument("--inputs-per-filter", type=positive, nargs="+")
    p.add_argument("--entries", type=power_of_two, nargs="+")
    p.add_argument("--hashes", type=positive, nargs="+")
    p.add_argument("--grid", choices=("mnist",), help="start from a preset grid; axis flags override it")
    p.add_argument("--seed", type=non_negative, default=0)
    p.add_argument("--workers", type=positive, default=1)
    p.add_argument("--no-timing", action="store_true", help="write nan for seconds so reruns are byte-identical")
    p.add_argument("--out", required=True, help="results file; existing rows are kept and skipped")
    p.set_defaults(func=cmd_sweep, usage=p)

    p = sub.add_parser("inspect", help="print a model file's header, config, b and size")
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_inspect, usage=p)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        args.usage.error(str(e))
    except (CliError, DatasetError, ValueError, OSError, OverflowError) as e:
        message = " ".join(str(e).split()) or type(e).__name__
        print(f"bthowen: error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
