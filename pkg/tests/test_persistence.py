import struct

import numpy as np
import pytest

from bthowen import persistence
from bthowen.benchmarks import SELECTED_MODELS
from bthowen.encoding import ThermometerEncoder
from bthowen.model import BthowenModel, ModelConfig
from bthowen.persistence import ModelFormatError, format_kib, from_bytes, to_bytes

TABLE_SIZES = {"MNIST-Small": "70.0", "MNIST-Medium": "210", "MNIST-Large": "960", "Ecoli": "0.875",
               "Iris": "0.281", "Letter": "78.0", "Satimage": "9.00", "Shuttle": "2.63", "Vehicle": "2.25",
               "Vowel": "3.44", "Wine": "0.422"}


@pytest.mark.parametrize("name", sorted(TABLE_SIZES))
def test_table_sizes(name):
    config = SELECTED_MODELS[name].config()
    assert format_kib(config.payload_bits) == TABLE_SIZES[name]
    assert persistence.payload_nbytes(config, True) * 8 == config.payload_bits


def test_size_formula():
    c = ModelConfig(784, 10, 2, 28, 1024, 2)
    assert c.payload_bits == 10 * 56 * 1024
    assert format_kib(0) == "0"
    assert format_kib(8192 * 1000) == "1000"


@pytest.fixture
def trained(blobs):
    c = ModelConfig(4, 3, 3, 5, 64, 2, seed=9)  # 12 bits, 3 padding
    m = BthowenModel.create(c, ThermometerEncoder.fit(blobs.features, 3), ["a", "b", "c"])
    m.train(blobs.features, blobs.labels)
    return m


def probes(n=100):
    return np.random.default_rng(1).normal(2, 3, size=(n, 4))


def test_round_trip_binarized(tmp_path, trained):
    m = trained.binarize(2)
    persistence.save(m, tmp_path / "m.bthw")
    back = persistence.load(tmp_path / "m.bthw")
    assert back.binarized and back.bleach == 2 and back.label_names == ["a", "b", "c"]
    assert np.array_equal(back.table, m.table)
    assert np.array_equal(back.predict_batch(probes()), m.predict_batch(probes()))
    assert to_bytes(back) == to_bytes(m)


def test_round_trip_counting(trained):
    back = from_bytes(to_bytes(trained))
    assert not back.binarized and back.bleach is None
    assert np.array_equal(back.table, trained.table)
    assert np.array_equal(back.predict_batch(probes(), 1), trained.predict_batch(probes(), 1))


def test_counting_files_are_larger(trained):
    c = trained.config
    assert persistence.payload_nbytes(c, False) == 32 * c.payload_bits // 8
    assert len(to_bytes(trained)) > len(to_bytes(trained.binarize(1)))


def test_serialization_is_deterministic(trained):
    assert to_bytes(trained.binarize(1)) == to_bytes(trained.binarize(1))


def test_header_layout(trained):
    raw = to_bytes(trained.binarize(3))
    assert raw[:4] == b"BTHW"
    assert struct.unpack("<HBB", raw[4:8]) == (1, 1, 0)
    (length,) = struct.unpack("<I", raw[8:12])
    fields = struct.unpack("<7QI", raw[12:12 + length])
    assert fields == (4, 3, 3, 5, 64, 2, 9, 3)


@pytest.mark.parametrize("mutate,match", [
    (lambda r: b"NOPE" + r[4:], "magic"),
    (lambda r: r[:4] + struct.pack("<H", 9) + r[6:], "version"),
    (lambda r: r[:6] + b"\x05" + r[7:], "state"),
    (lambda r: r[:-1], "truncated"),
    (lambda r: r + b"\0", "trailing"),
    (lambda r: r[:3], "truncated"),
])
def test_corrupt_files(trained, mutate, match):
    with pytest.raises(ModelFormatError, match=match):
        from_bytes(mutate(to_bytes(trained.binarize(1))))


def test_payload_length_must_match_config(trained):
    raw = bytearray(to_bytes(trained.binarize(1)))
    # entries 64 -> 128 in the config block: payload is now too short
    raw[12 + 32:12 + 40] = struct.pack("<Q", 128)
    with pytest.raises(ModelFormatError):
        from_bytes(bytes(raw))


def test_load_missing_file(tmp_path):
    with pytest.raises(ModelFormatError, match="cannot read"):
        persistence.load(tmp_path / "nope.bthw")


def test_describe(trained):
    text = persistence.describe(trained.binarize(4))
    assert "entries_per_filter=64, hashes=2, b=4" in text
    assert "size=0.0703 KiB" in text
    assert "labels=a,b,c" in text
