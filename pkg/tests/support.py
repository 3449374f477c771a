"""Helpers shared by the unit and acceptance tests."""
import itertools

import numpy as np

from bthowen.hashing import H3HashFamily

# acceptance criterion number -> PASS/FAIL line, printed in the run summary
ACCEPTANCE_LINES = {}


def all_patterns(n: int) -> np.ndarray:
    return np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.uint8)


def injective_family(rng: np.random.Generator, n: int, m: int) -> H3HashFamily:
    """One H3 function whose n parameters are linearly independent over GF(2).

    Distinct inputs then get distinct addresses, so a filter over it cannot
    collide.
    """
    assert m >= n
    while True:
        params = rng.integers(0, 1 << m, size=(1, n), dtype=np.uint32)
        family = H3HashFamily(params, m)
        if np.unique(family.hash_all(all_patterns(n))[:, 0]).size == 1 << n:
            return family


def random_bits(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.integers(0, 2, size=shape, dtype=np.uint8)
