"""Dataset ingestion: MNIST-style IDX files and delimited text tables."""
import csv
import gzip
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801


class DatasetError(ValueError):
    pass


@dataclass
class LabeledDataset:
    features: np.ndarray
    labels: np.ndarray
    class_count: int
    label_names: Optional[List[str]] = field(default=None)

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise DatasetError("features must be a (samples, features) matrix")
        if self.features.shape[0] != self.labels.shape[0]:
            raise DatasetError(f"{self.features.shape[0]} feature rows but {self.labels.shape[0]} labels")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.class_count):
            raise DatasetError("labels must lie in [0, class_count)")
        if not np.all(np.isfinite(self.features)):
            raise DatasetError("features contain non-finite values")
        if self.label_names is not None and len(self.label_names) != self.class_count:
            raise DatasetError("label_names length must equal class_count")

    def __len__(self):
        return self.labels.shape[0]

    @property
    def feature_count(self) -> int:
        return self.features.shape[1]

    def subset(self, index) -> "LabeledDataset":
        return LabeledDataset(self.features[index], self.labels[index], self.class_count, self.label_names)


def _read_maybe_gzip(path) -> bytes:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise DatasetError(f"cannot read {path}: {e.strerror}") from e
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    return raw


def _idx_header(raw: bytes, path, magic: int, ndim: int):
    head = 4 + 4 * ndim
    if len(raw) < head:
        raise DatasetError(f"{path}: truncated IDX header")
    (found,) = struct.unpack(">I", raw[:4])
    if found != magic:
        raise DatasetError(f"{path}: bad IDX magic {found} (expected {magic})")
    dims = struct.unpack(f">{ndim}I", raw[4:head])
    if len(raw) != head + math.prod(dims):
        raise DatasetError(f"{path}: payload is {len(raw) - head} bytes, header declares {math.prod(dims)}")
    return dims, np.frombuffer(raw, dtype=np.uint8, offset=head)


def load_idx(images_path, labels_path) -> LabeledDataset:
    """Load an IDX image/label pair (optionally gzip-compressed); pixels stay in [0, 255]."""
    (count, rows, cols), pixels = _idx_header(_read_maybe_gzip(images_path), images_path, IDX_IMAGES_MAGIC, 3)
    (label_count,), labels = _idx_header(_read_maybe_gzip(labels_path), labels_path, IDX_LABELS_MAGIC, 1)
    if count != label_count:
        raise DatasetError(f"{count} images but {label_count} labels")
    labels = labels.astype(np.int64)
    class_count = int(labels.max()) + 1 if labels.size else 0
    return LabeledDataset(pixels.reshape(count, rows * cols).astype(np.float64), labels, max(class_count, 1))


def load_idx_images(images_path) -> np.ndarray:
    """Pixels of an IDX image file as a (count, rows * cols) float matrix."""
    (count, rows, cols), pixels = _idx_header(_read_maybe_gzip(images_path), images_path, IDX_IMAGES_MAGIC, 3)
    return pixels.reshape(count, rows * cols).astype(np.float64)


def save_idx(dataset: LabeledDataset, images_path, labels_path, shape=None) -> None:
    """Write features (must be integers in [0, 255]) and labels as an IDX pair."""
    s, f = dataset.features.shape
    rows, cols = shape if shape is not None else (1, f)
    if rows * cols != f:
        raise DatasetError(f"shape {rows}x{cols} does not hold {f} features")
    pixels = dataset.features.astype(np.uint8)
    if not np.array_equal(pixels, dataset.features):
        raise DatasetError("IDX images hold unsigned bytes only")
    Path(images_path).write_bytes(struct.pack(">4I", IDX_IMAGES_MAGIC, s, rows, cols) + pixels.tobytes())
    Path(labels_path).write_bytes(struct.pack(">2I", IDX_LABELS_MAGIC, s) + dataset.labels.astype(np.uint8).tobytes())


def _read_rows(path, delimiter):
    # a blank delimiter means "split on runs of whitespace"
    if delimiter is not None and len(delimiter) != 1:
        raise DatasetError("delimiter must be a single character")
    try:
        with open(path, newline="") as f:
            if delimiter is None or delimiter == " ":
                rows = [line.split() for line in f]
            else:
                rows = list(csv.reader(f, delimiter=delimiter))
    except OSError as e:
        raise DatasetError(f"cannot read {path}: {e.strerror}") from e
    return [r for r in rows if r and any(c.strip() for c in r)]


def load_delimited(path, delimiter: Optional[str] = ",", label_column: int = -1,
                   label_dictionary: Optional[Sequence[str]] = None, header: bool = False) -> LabeledDataset:
    """Read a table of numeric features plus one label column.

    Labels map to dense indices: through ``label_dictionary`` when given
    (unknown labels are an error), otherwise in order of first appearance.
    """
    rows = _read_rows(path, delimiter)
    if header and rows:
        rows = rows[1:]
    names = list(label_dictionary) if label_dictionary is not None else []
    index = {name: i for i, name in enumerate(names)}
    width = len(rows[0]) if rows else None
    features, labels = [], []
    for lineno, row in enumerate(rows, start=2 if header else 1):
        if len(row) != width:
            raise DatasetError(f"{path}:{lineno}: expected {width} columns, got {len(row)}")
        try:
            label = row[label_column].strip()
        except IndexError:
            raise DatasetError(f"{path}:{lineno}: no column {label_column}") from None
        if label not in index:
            if label_dictionary is not None:
                raise DatasetError(f"{path}:{lineno}: unknown label {label!r}")
            index[label] = len(names)
            names.append(label)
        labels.append(index[label])
        values = row[:label_column % width] + row[label_column % width + 1:]
        try:
            features.append([float(v) for v in values])
        except ValueError as e:
            raise DatasetError(f"{path}:{lineno}: {e}") from None
    feature_count = 0 if width is None else width - 1
    x = np.array(features, dtype=np.float64).reshape(len(features), feature_count)
    return LabeledDataset(x, np.array(labels, dtype=np.int64), max(len(names), 1), names or None)


def load_features(path, delimiter: Optional[str] = ",", header: bool = False, drop_column: Optional[int] = None) -> np.ndarray:
    """Read an unlabeled numeric table, optionally ignoring one column."""
    rows = _read_rows(path, delimiter)
    if header and rows:
        rows = rows[1:]
    out = []
    for lineno, row in enumerate(rows, start=2 if header else 1):
        if drop_column is not None:
            row = row[:drop_column % len(row)] + row[drop_column % len(row) + 1:]
        try:
            out.append([float(v) for v in row])
        except ValueError as e:
            raise DatasetError(f"{path}:{lineno}: {e}") from None
    if len({len(r) for r in out}) > 1:
        raise DatasetError(f"{path}: ragged rows")
    return np.array(out, dtype=np.float64).reshape(len(out), len(out[0]) if out else 0)


def save_delimited(dataset: LabeledDataset, path, delimiter: str = ",", header: bool = True) -> None:
    names = dataset.label_names or [str(i) for i in range(dataset.class_count)]
    with open(path, "w", newline="") as f:
        w = csv.writer(f, delimiter=delimiter)
        if header:
            w.writerow([f"x{i}" for i in range(dataset.feature_count)] + ["class"])
        for row, label in zip(dataset.features, dataset.labels):
            w.writerow([repr(float(v)) for v in row] + [names[label]])


def split(dataset: LabeledDataset, train_fraction: float = 0.9, seed: int = 0):
    """Seeded shuffle, then prefix (train) / suffix (held out)."""
    if not 0 < train_fraction < 1:
        raise DatasetError("train_fraction must be in (0, 1)")
    n = len(dataset)
    order = np.random.default_rng(seed).permutation(n)
    cut = int(round(train_fraction * n))
    if n >= 2:
        cut = min(max(cut, 1), n - 1)
    return dataset.subset(order[:cut]), dataset.subset(order[cut:])
