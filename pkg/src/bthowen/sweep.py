"""Grid sweeps over (t, n, entries, k) with a resumable results file."""
import csv
import itertools
import math
import time
import zlib
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .datasets import LabeledDataset
from .model import ModelConfig, is_power_of_two
from .pipeline import train_model

COLUMNS = ("dataset", "t", "n", "entries", "k", "seed", "b", "val_acc", "test_acc", "size_kib", "seconds", "error")


@dataclass(frozen=True)
class SweepGrid:
    bits_per_input: Tuple[int, ...]
    inputs_per_filter: Tuple[int, ...]
    entries: Tuple[int, ...]
    hashes: Tuple[int, ...]
    seed: int = 0
    dataset: str = "data"

    def __post_init__(self):
        for name in ("bits_per_input", "inputs_per_filter", "entries", "hashes"):
            values = tuple(getattr(self, name))
            if not values:
                raise ValueError(f"sweep axis {name} is empty")
            if any(v < 1 for v in values):
                raise ValueError(f"sweep axis {name} has non-positive values")
            if len(set(values)) != len(values):
                raise ValueError(f"sweep axis {name} has duplicates")
            object.__setattr__(self, name, values)
        bad = [e for e in self.entries if not is_power_of_two(e)]
        if bad:
            raise ValueError(f"entries must be powers of two, got {bad}")

    def points(self) -> List[Tuple[int, int, int, int]]:
        return list(itertools.product(self.bits_per_input, self.inputs_per_filter, self.entries, self.hashes))

    def __len__(self):
        return len(self.bits_per_input) * len(self.inputs_per_filter) * len(self.entries) * len(self.hashes)


MNIST_GRID = SweepGrid(
    bits_per_input=(1, 2, 3, 4, 5, 6, 7, 8),
    inputs_per_filter=(28, 49, 56),
    entries=(128, 256, 512, 1024, 2048, 4096, 8192),
    hashes=(1, 2, 3, 4, 5, 6),
    dataset="mnist",
)


def point_seed(base: int, t: int, n: int, entries: int, k: int) -> int:
    """Seed for one grid point: the base seed mixed with a checksum of its config."""
    tag = zlib.crc32(f"{t},{n},{entries},{k}".encode())
    return int(np.random.SeedSequence([base, tag]).generate_state(1)[0])


@dataclass(frozen=True)
class SweepResult:
    dataset: str
    t: int
    n: int
    entries: int
    k: int
    seed: int
    b: int
    val_acc: float
    test_acc: float
    size_kib: float
    seconds: float = math.nan
    error: str = ""

    @property
    def key(self):
        return (self.dataset, self.t, self.n, self.entries, self.k, self.seed)

    @property
    def ok(self) -> bool:
        return not self.error

    def row(self) -> List[str]:
        return [self.dataset, str(self.t), str(self.n), str(self.entries), str(self.k), str(self.seed), str(self.b),
                repr(self.val_acc), repr(self.test_acc), repr(self.size_kib), repr(self.seconds), self.error]

    @classmethod
    def from_row(cls, row: dict) -> "SweepResult":
        return cls(row["dataset"], int(row["t"]), int(row["n"]), int(row["entries"]), int(row["k"]),
                   int(row["seed"]), int(row["b"]), float(row["val_acc"]), float(row["test_acc"]),
                   float(row["size_kib"]), float(row["seconds"]), row["error"])


def sort_key(r: SweepResult):
    acc = r.test_acc if r.ok and not math.isnan(r.test_acc) else -1.0
    return (r.size_kib, -acc, r.t, r.n, r.entries, r.k, r.seed)


def pareto_frontier(results: Iterable[SweepResult]) -> List[SweepResult]:
    """Most accurate model under each size bound, smallest first."""
    frontier = []
    for r in sorted((r for r in results if r.ok), key=sort_key):
        if not frontier or r.test_acc > frontier[-1].test_acc:
            frontier.append(r)
    return frontier


# per-process copies of the data, set once by the pool initializer
_DATA: dict = {}


def _install(train: LabeledDataset, test: LabeledDataset) -> None:
    _DATA["train"] = train
    _DATA["test"] = test


def evaluate_point(dataset: str, t: int, n: int, entries: int, k: int, seed: int,
                   record_time: bool = True) -> SweepResult:
    train, test = _DATA["train"], _DATA["test"]
    start = time.perf_counter()
    try:
        config = ModelConfig(train.feature_count, train.class_count, t, n, entries, k, seed)
        size = config.payload_bits / 8192
        run = train_model(config, train)
        acc = run.model.evaluate(test.features, test.labels)
        result = SweepResult(dataset, t, n, entries, k, seed, run.bleach, run.val_accuracy, acc, size)
    except Exception as e:  # a bad point is recorded, not fatal
        size = train.class_count * -(-train.feature_count * t // n) * entries / 8192
        message = " ".join(f"{type(e).__name__}: {e}".split())
        result = SweepResult(dataset, t, n, entries, k, seed, 0, math.nan, math.nan, size, error=message)
    if record_time:
        result = SweepResult(*[getattr(result, c) for c in COLUMNS[:10]],
                             seconds=round(time.perf_counter() - start, 3), error=result.error)
    return result


def read_results(path) -> List[SweepResult]:
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if tuple(reader.fieldnames or ()) != COLUMNS:
            raise ValueError(f"{path}: not a sweep results file (header {reader.fieldnames})")
        return [SweepResult.from_row(row) for row in reader]


def write_results(path, results: Sequence[SweepResult]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(COLUMNS)
        w.writerows(r.row() for r in results)


def run_sweep(grid: SweepGrid, train: LabeledDataset, test: LabeledDataset, workers: int = 1,
              out: Optional[Path] = None, record_time: bool = True) -> List[SweepResult]:
    """Train and evaluate every grid point; results come back sorted by (size, -accuracy).

    With ``out`` set, rows are appended as points finish and points already in
    the file are skipped, so an interrupted sweep resumes where it stopped.
    The file is rewritten in sorted order at the end.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    done = {}
    if out is not None and Path(out).exists() and Path(out).stat().st_size:
        done = {r.key: r for r in read_results(out)}
    elif out is not None:
        write_results(out, [])
    todo = []
    for t, n, e, k in grid.points():
        seed = point_seed(grid.seed, t, n, e, k)
        if (grid.dataset, t, n, e, k, seed) not in done:
            todo.append((grid.dataset, t, n, e, k, seed, record_time))

    results = list(done.values())
    sink = open(out, "a", newline="") if out is not None else None
    try:
        writer = csv.writer(sink, lineterminator="\n") if sink else None

        def keep(r):
            results.append(r)
            if writer:
                writer.writerow(r.row())
                sink.flush()

        if workers == 1:
            _install(train, test)
            for args in todo:
                keep(evaluate_point(*args))
        else:
            with ProcessPoolExecutor(workers, initializer=_install, initargs=(train, test)) as pool:
                for fut in as_completed([pool.submit(evaluate_point, *args) for args in todo]):
                    keep(fut.result())
    finally:
        if sink:
            sink.close()
    results.sort(key=sort_key)
    if out is not None:
        write_results(out, results)
    return results
