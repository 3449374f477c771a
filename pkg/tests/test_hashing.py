import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bthowen.hashing import H3HashFamily
from support import all_patterns, random_bits


def test_worked_xor_example():
    family = H3HashFamily([[0b001, 0b010, 0b100, 0b111]], 3)
    assert family.hash(0, [1, 1, 0, 1]) == 0b100
    assert family.hash_all(np.array([1, 1, 0, 1]))[0] == 0b100


def test_zero_and_one_hot():
    rng = np.random.default_rng(3)
    family = H3HashFamily.sample(rng, 12, 9, 3)
    assert family.hash_all(np.zeros(12, dtype=np.uint8)).tolist() == [0, 0, 0]
    for j in range(12):
        x = np.zeros(12, dtype=np.uint8)
        x[j] = 1
        assert family.hash_all(x).tolist() == family.params[:, j].tolist()


def test_sampling_is_deterministic():
    a = H3HashFamily.sample(np.random.default_rng(11), 28, 10, 2)
    b = H3HashFamily.sample(np.random.default_rng(11), 28, 10, 2)
    assert a == b
    assert a != H3HashFamily.sample(np.random.default_rng(12), 28, 10, 2)


def test_shapes_and_ranges():
    family = H3HashFamily.sample(np.random.default_rng(0), 4, 3, 6)
    assert family.params.shape == (6, 4)
    assert family.params.max() < 8
    one_bit = H3HashFamily.sample(np.random.default_rng(0), 40, 1, 2)
    assert set(np.unique(one_bit.params)) <= {0, 1}


@pytest.mark.parametrize("args", [(0, 4, 1), (4, 0, 1), (4, 31, 1), (4, 4, 0)])
def test_sample_rejects_bad_bounds(args):
    n, m, k = args
    with pytest.raises(ValueError):
        H3HashFamily.sample(np.random.default_rng(0), n, m, k)


def test_constructor_rejects_wide_params():
    with pytest.raises(ValueError):
        H3HashFamily([[8, 1]], 3)
    with pytest.raises(ValueError):
        H3HashFamily(np.zeros((0, 3)), 3)


def test_hash_index_out_of_range():
    family = H3HashFamily.sample(np.random.default_rng(0), 4, 3, 2)
    with pytest.raises(IndexError):
        family.hash(2, [0, 1, 0, 1])


def test_wrong_input_width():
    family = H3HashFamily.sample(np.random.default_rng(0), 4, 3, 2)
    with pytest.raises(ValueError):
        family.hash(0, [0, 1, 0])
    with pytest.raises(ValueError):
        family.hash_all(np.zeros((2, 5)))


@pytest.mark.parametrize("n", [1, 7, 8, 9, 16, 28, 49])
def test_table_lookup_matches_scalar(n):
    rng = np.random.default_rng(n)
    family = H3HashFamily.sample(rng, n, 13, 3)
    x = random_bits(rng, (50, n))
    fast = family.hash_all(x)
    for row, out in zip(x, fast):
        assert out.tolist() == [family.hash(j, row) for j in range(3)]


def test_hash_all_keeps_leading_axes():
    family = H3HashFamily.sample(np.random.default_rng(0), 10, 5, 4)
    x = random_bits(np.random.default_rng(1), (3, 7, 10))
    assert family.hash_all(x).shape == (3, 7, 4)


@given(st.integers(1, 40), st.integers(1, 30), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_xor_linearity_and_range(n, m, k, seed):
    rng = np.random.default_rng(seed)
    family = H3HashFamily.sample(rng, n, m, k)
    x, y = random_bits(rng, (2, 20, n))
    hx, hy, hxy = family.hash_all(x), family.hash_all(y), family.hash_all(x ^ y)
    assert np.array_equal(hxy, hx ^ hy)
    assert hxy.max() < 1 << m


def test_full_rank_family_is_injective():
    family = H3HashFamily([[1 << i for i in range(6)]], 6)
    assert np.unique(family.hash_all(all_patterns(6))).size == 64
