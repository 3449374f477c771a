"""Counting and binary Bloom filters over a shared H3 hash family.

A filter owns one array of ``2**m`` entries addressed by all ``k`` hash
functions.  Counting filters use the min-increment update: on insertion only
the addressed counters that currently hold the minimum are bumped, so the
minimum over an input's counters tracks how often it was seen (never less).
"""
from collections import Counter

import numpy as np

from .hashing import H3HashFamily

COUNTER_MAX = np.iinfo(np.uint32).max


def _addresses(family: H3HashFamily, x) -> np.ndarray:
    bits = np.asarray(x, dtype=np.uint8)
    if bits.shape != (family.input_bits,):
        raise ValueError(f"expected {family.input_bits} input bits, got shape {bits.shape}")
    return family.hash_all(bits).astype(np.intp)


class CountingBloomFilter:
    def __init__(self, family: H3HashFamily, counters=None):
        self.family = family
        size = 1 << family.output_bits
        if counters is None:
            counters = np.zeros(size, dtype=np.uint32)
        elif counters.shape != (size,) or counters.dtype != np.uint32:
            raise ValueError(f"counters must be a uint32 array of length {size}")
        # may be a view into a model's counter block; updates write through
        self.counters = counters

    def add(self, x) -> None:
        addr = _addresses(self.family, x)
        vals = self.counters[addr]
        low = vals.min()
        if low == COUNTER_MAX:
            raise OverflowError("counter overflow")
        # duplicate addresses are assigned, not accumulated, so a slot hit by
        # two hash functions is still incremented once
        self.counters[addr[vals == low]] = low + 1

    def count(self, x) -> int:
        """Minimum over the addressed counters; an upper bound on times seen."""
        return int(self.counters[_addresses(self.family, x)].min())

    def query(self, x, b: int) -> bool:
        if b < 1:
            raise ValueError(f"bleaching threshold must be >= 1, got {b}")
        return self.count(x) >= b

    def max_counter(self) -> int:
        return int(self.counters.max())

    def binarize(self, b: int) -> "BinaryBloomFilter":
        if b < 1:
            raise ValueError(f"bleaching threshold must be >= 1, got {b}")
        return BinaryBloomFilter(self.family, self.counters >= b)


class BinaryBloomFilter:
    def __init__(self, family: H3HashFamily, bits=None):
        self.family = family
        size = 1 << family.output_bits
        bits = np.zeros(size, dtype=bool) if bits is None else np.array(bits, dtype=bool)
        if bits.shape != (size,):
            raise ValueError(f"bits must have length {size}")
        bits.setflags(write=False)
        self.bits = bits

    def query(self, x) -> bool:
        return bool(self.bits[_addresses(self.family, x)].all())


class ExactCountingFilter:
    """Collision-free reference: exact occurrence count per input pattern."""

    def __init__(self):
        self.counts = Counter()

    def add(self, x) -> None:
        self.counts[tuple(int(v) for v in x)] += 1

    def count(self, x) -> int:
        return self.counts[tuple(int(v) for v in x)]

    def query(self, x, b: int) -> bool:
        return self.count(x) >= b
