"""BTHOWeN model: thermometer encoding, shared pseudo-random input mapping, and
one discriminator of counting Bloom filters per class.

Counters for every filter live in one ``(classes, filters, entries)`` block so
training and inference vectorize across filters; :attr:`BthowenModel.discriminators`
exposes the same storage as per-filter objects.
"""
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .encoding import ThermometerEncoder
from .filters import COUNTER_MAX, BinaryBloomFilter, CountingBloomFilter
from .hashing import MAX_OUTPUT_BITS, H3HashFamily

BATCH = 2048


def is_power_of_two(v: int) -> bool:
    return v > 0 and v & (v - 1) == 0


@dataclass(frozen=True)
class ModelConfig:
    feature_count: int
    class_count: int
    bits_per_input: int
    inputs_per_filter: int
    entries_per_filter: int
    hashes_per_filter: int
    seed: int = 0

    def __post_init__(self):
        for name in ("feature_count", "bits_per_input", "inputs_per_filter", "entries_per_filter", "hashes_per_filter"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.class_count < 2:
            raise ValueError(f"class_count must be >= 2, got {self.class_count}")
        if not is_power_of_two(self.entries_per_filter):
            raise ValueError(f"entries_per_filter must be a power of two, got {self.entries_per_filter}")
        if self.entries_per_filter > 1 << MAX_OUTPUT_BITS or self.entries_per_filter < 2:
            raise ValueError(f"entries_per_filter must be in [2, 2**{MAX_OUTPUT_BITS}]")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    @property
    def encoded_bits(self) -> int:
        return self.feature_count * self.bits_per_input

    @property
    def filters_per_discriminator(self) -> int:
        return -(-self.encoded_bits // self.inputs_per_filter)

    @property
    def padded_bits(self) -> int:
        return self.filters_per_discriminator * self.inputs_per_filter

    @property
    def address_bits(self) -> int:
        return self.entries_per_filter.bit_length() - 1

    @property
    def payload_bits(self) -> int:
        """Bits of binarized filter storage: classes x filters x entries."""
        return self.class_count * self.filters_per_discriminator * self.entries_per_filter

    @property
    def size_kib(self) -> float:
        return self.payload_bits / 8192


@dataclass(frozen=True)
class InputMapping:
    permutation: np.ndarray  # mapped bit j reads padded encoded bit permutation[j]
    padding: int

    def __post_init__(self):
        p = np.asarray(self.permutation, dtype=np.int64)
        if p.ndim != 1 or not np.array_equal(np.sort(p), np.arange(p.size)):
            raise ValueError("permutation must be a bijection on [0, len)")
        if not 0 <= self.padding < p.size:
            raise ValueError("padding out of range")
        p.setflags(write=False)
        object.__setattr__(self, "permutation", p)

    @property
    def size(self) -> int:
        return self.permutation.size

    def apply(self, encoded: np.ndarray, inputs_per_filter: int) -> np.ndarray:
        """(samples, I) bits -> (samples, N, n) filter input slices."""
        s = encoded.shape[0]
        if encoded.shape[1] + self.padding != self.size:
            raise ValueError(f"expected {self.size - self.padding} encoded bits, got {encoded.shape[1]}")
        if self.padding:
            encoded = np.concatenate([encoded, np.zeros((s, self.padding), dtype=encoded.dtype)], axis=1)
        return encoded[:, self.permutation].reshape(s, -1, inputs_per_filter)


class Discriminator:
    """Per-class view: a list of filters that share the model's hash family."""

    def __init__(self, filters):
        self.filters = filters

    def response(self, slices, b: Optional[int] = None) -> int:
        if len(slices) != len(self.filters):
            raise ValueError(f"expected {len(self.filters)} slices, got {len(slices)}")
        if isinstance(self.filters[0], BinaryBloomFilter):
            return sum(f.query(x) for f, x in zip(self.filters, slices))
        if b is None:
            raise ValueError("a counting discriminator needs a bleaching threshold")
        return sum(f.query(x, b) for f, x in zip(self.filters, slices))


class BthowenModel:
    def __init__(self, config: ModelConfig, encoder: ThermometerEncoder, mapping: InputMapping,
                 family: H3HashFamily, table: np.ndarray, bleach: Optional[int] = None,
                 label_names: Optional[Sequence[str]] = None):
        shape = (config.class_count, config.filters_per_discriminator, config.entries_per_filter)
        if encoder.feature_count != config.feature_count or encoder.bits_per_input != config.bits_per_input:
            raise ValueError("encoder shape does not match config")
        if mapping.size != config.padded_bits or mapping.padding != config.padded_bits - config.encoded_bits:
            raise ValueError("input mapping does not match config")
        if (family.input_bits, family.output_bits, family.num_hashes) != (
                config.inputs_per_filter, config.address_bits, config.hashes_per_filter):
            raise ValueError("hash family does not match config")
        if table.shape != shape or table.dtype not in (np.uint32, np.bool_):
            raise ValueError(f"filter table must be uint32 or bool with shape {shape}")
        if table.dtype == np.bool_ and (bleach is None or bleach < 1):
            raise ValueError("a binarized model must record its bleaching threshold")
        if label_names is not None and len(label_names) != config.class_count:
            raise ValueError("label_names length must equal class_count")
        self.config = config
        self.encoder = encoder
        self.mapping = mapping
        self.family = family
        self.table = table
        self.bleach = bleach
        self.label_names = list(label_names) if label_names is not None else None

    @classmethod
    def create(cls, config: ModelConfig, encoder: ThermometerEncoder, label_names=None) -> "BthowenModel":
        """Empty counting model; permutation then hash parameters drawn from ``config.seed``."""
        rng = np.random.default_rng(config.seed)
        mapping = InputMapping(rng.permutation(config.padded_bits), config.padded_bits - config.encoded_bits)
        family = H3HashFamily.sample(rng, config.inputs_per_filter, config.address_bits, config.hashes_per_filter)
        table = np.zeros((config.class_count, config.filters_per_discriminator, config.entries_per_filter),
                         dtype=np.uint32)
        return cls(config, encoder, mapping, family, table, None, label_names)

    @property
    def binarized(self) -> bool:
        return self.table.dtype == np.bool_

    @property
    def discriminators(self):
        if self.binarized:
            return [Discriminator([BinaryBloomFilter(self.family, row) for row in d]) for d in self.table]
        return [Discriminator([CountingBloomFilter(self.family, row) for row in d]) for d in self.table]

    def max_counter(self) -> int:
        if self.binarized:
            raise ValueError("binarized model has no counters")
        return int(self.table.max())

    def slices(self, samples) -> np.ndarray:
        """Encode and map samples: (S, F) reals -> (S, N, n) bits."""
        x = np.asarray(samples, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.config.feature_count:
            raise ValueError(f"expected samples with {self.config.feature_count} features, got shape {x.shape}")
        return self.mapping.apply(self.encoder.encode_batch(x), self.config.inputs_per_filter)

    def addresses(self, samples) -> np.ndarray:
        """(S, F) reals -> (S, N, k) filter addresses."""
        return self.family.hash_all(self.slices(samples)).astype(np.intp)

    def _check_label(self, label):
        if not 0 <= label < self.config.class_count:
            raise ValueError(f"label {label} out of range for {self.config.class_count} classes")

    def _train_addresses(self, addr: np.ndarray, label: int) -> None:
        block = self.table[label]
        rows = np.arange(addr.shape[0])[:, None]
        vals = block[rows, addr]
        low = vals.min(axis=1, keepdims=True)
        if low.max() == COUNTER_MAX:
            raise OverflowError("counter overflow")
        hit = vals == low
        block[np.broadcast_to(rows, addr.shape)[hit], addr[hit]] = np.broadcast_to(low + 1, addr.shape)[hit]

    def train_sample(self, sample, label: int) -> None:
        if self.binarized:
            raise ValueError("cannot train a binarized model")
        self._check_label(label)
        self._train_addresses(self.addresses(np.asarray(sample, dtype=np.float64)[None, :])[0], label)

    def train(self, features, labels) -> None:
        """Present each sample once, in order, to its class discriminator."""
        if self.binarized:
            raise ValueError("cannot train a binarized model")
        x = np.asarray(features, dtype=np.float64)
        y = np.asarray(labels, dtype=np.int64)
        if x.shape[0] != y.shape[0]:
            raise ValueError("features and labels differ in length")
        if y.size and (y.min() < 0 or y.max() >= self.config.class_count):
            raise ValueError("label out of range")
        for start in range(0, x.shape[0], BATCH):
            addr = self.addresses(x[start:start + BATCH])
            for a, label in zip(addr, y[start:start + BATCH]):
                self._train_addresses(a, int(label))

    def filter_scores(self, samples) -> np.ndarray:
        """Per-filter lookup result, shape (classes, S, N).

        Counting models give the minimum addressed counter; binarized models
        give the AND of the addressed bits as 0/1.
        """
        x = np.asarray(samples, dtype=np.float64)
        out = []
        n_filters = self.config.filters_per_discriminator
        rows = np.arange(n_filters)[:, None]
        for start in range(0, max(x.shape[0], 1), BATCH):
            addr = self.addresses(x[start:start + BATCH])
            chunk = np.empty((self.config.class_count, addr.shape[0], n_filters), dtype=np.uint32)
            for d, block in enumerate(self.table):
                looked = block[rows, addr]
                chunk[d] = looked.all(axis=2) if self.binarized else looked.min(axis=2)
            out.append(chunk)
        return np.concatenate(out, axis=1)

    def responses(self, samples, b: Optional[int] = None) -> np.ndarray:
        """Popcount per class, shape (S, classes)."""
        scores = self.filter_scores(samples)
        if not self.binarized:
            if b is None:
                raise ValueError("a counting model needs a bleaching threshold b")
            if b < 1:
                raise ValueError(f"bleaching threshold must be >= 1, got {b}")
            scores = scores >= b
        return scores.astype(bool).sum(axis=2).T

    def predict_batch(self, samples, b: Optional[int] = None) -> np.ndarray:
        # argmax returns the first maximum, i.e. the lowest class index on ties
        return np.argmax(self.responses(samples, b), axis=1)

    def predict(self, sample, b: Optional[int] = None) -> int:
        return int(self.predict_batch(np.asarray(sample, dtype=np.float64)[None, :], b)[0])

    def evaluate(self, features, labels, b: Optional[int] = None) -> float:
        y = np.asarray(labels)
        if y.size == 0:
            raise ValueError("cannot evaluate on an empty set")
        return float(np.mean(self.predict_batch(features, b) == y))

    def select_bleach(self, features, labels):
        """Search b in [1, max counter] for the best validation accuracy.

        Probes accuracy at mid and mid + 1 and moves toward the better side;
        returns the best ``(b, accuracy)`` seen over every probe and both
        endpoints, preferring the smaller b on ties.
        """
        if self.binarized:
            raise ValueError("bleaching threshold search needs a counting model")
        y = np.asarray(labels)
        if y.size == 0:
            raise ValueError("validation set is empty")
        scores = self.filter_scores(features)
        cache = {}

        def accuracy(b):
            if b not in cache:
                pred = np.argmax((scores >= b).sum(axis=2), axis=0)
                cache[b] = float(np.mean(pred == y))
            return cache[b]

        lo, hi = 1, max(self.max_counter(), 1)
        # the endpoints are always candidates; the probes below only climb locally
        accuracy(lo)
        accuracy(hi)
        while lo < hi:
            mid = (lo + hi) // 2
            if accuracy(mid + 1) > accuracy(mid):
                lo = mid + 1
            else:
                hi = mid
        accuracy(lo)
        best = max(cache, key=lambda b: (cache[b], -b))
        return best, cache[best]

    def binarize(self, b: int) -> "BthowenModel":
        if self.binarized:
            raise ValueError("model is already binarized")
        if b < 1:
            raise ValueError(f"bleaching threshold must be >= 1, got {b}")
        return BthowenModel(self.config, self.encoder, self.mapping, self.family, self.table >= b, b,
                            self.label_names)
