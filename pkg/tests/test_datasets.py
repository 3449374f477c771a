import gzip
import struct
from collections import Counter

import numpy as np
import pytest

from bthowen.datasets import (DatasetError, LabeledDataset, load_delimited, load_features, load_idx, load_idx_images,
                              save_delimited, save_idx, split)


def write_idx(tmp_path, images, labels, compress=False):
    count, rows, cols = images.shape
    img = struct.pack(">4I", 0x803, count, rows, cols) + images.astype(np.uint8).tobytes()
    lab = struct.pack(">2I", 0x801, count) + labels.astype(np.uint8).tobytes()
    if compress:
        img, lab = gzip.compress(img), gzip.compress(lab)
    ip, lp = tmp_path / "images.idx", tmp_path / "labels.idx"
    ip.write_bytes(img)
    lp.write_bytes(lab)
    return ip, lp


@pytest.mark.parametrize("compress", [False, True])
def test_idx_round_trip(tmp_path, compress):
    rng = np.random.default_rng(0)
    images = rng.integers(0, 256, size=(5, 3, 2))
    labels = np.array([0, 3, 1, 3, 2])
    d = load_idx(*write_idx(tmp_path, images, labels, compress))
    assert d.features.shape == (5, 6)
    assert np.array_equal(d.features, images.reshape(5, 6))
    assert d.labels.tolist() == labels.tolist()
    assert d.class_count == 4
    assert np.array_equal(load_idx_images(tmp_path / "images.idx"), d.features)


def test_save_idx_matches_reader(tmp_path):
    d = LabeledDataset(np.array([[0, 255, 7, 9]]), np.array([1]), 2)
    save_idx(d, tmp_path / "i", tmp_path / "l", shape=(2, 2))
    back = load_idx(tmp_path / "i", tmp_path / "l")
    assert np.array_equal(back.features, d.features) and back.labels.tolist() == [1]
    with pytest.raises(DatasetError):
        save_idx(LabeledDataset(np.array([[0.5]]), np.array([0]), 1), tmp_path / "i", tmp_path / "l")


def test_idx_errors(tmp_path):
    ip, lp = write_idx(tmp_path, np.zeros((2, 2, 2)), np.array([0, 1]))
    raw = ip.read_bytes()
    (tmp_path / "bad_magic").write_bytes(b"\0\0\x08\x01" + raw[4:])
    with pytest.raises(DatasetError, match="magic"):
        load_idx(tmp_path / "bad_magic", lp)
    (tmp_path / "short").write_bytes(raw[:-1])
    with pytest.raises(DatasetError, match="payload"):
        load_idx(tmp_path / "short", lp)
    (tmp_path / "tiny").write_bytes(raw[:6])
    with pytest.raises(DatasetError, match="header"):
        load_idx(tmp_path / "tiny", lp)
    _, lp3 = write_idx(tmp_path, np.zeros((3, 2, 2)), np.array([0, 1, 1]))
    ip2 = tmp_path / "two"
    ip2.write_bytes(raw)
    with pytest.raises(DatasetError, match="labels"):
        load_idx(ip2, lp3)
    with pytest.raises(DatasetError, match="cannot read"):
        load_idx(tmp_path / "missing", lp)


def test_delimited_labels_in_first_appearance_order(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("a,b,label\n1,2,dog\n3,4,cat\n5,6,dog\n")
    d = load_delimited(p, header=True)
    assert d.label_names == ["dog", "cat"]
    assert d.labels.tolist() == [0, 1, 0]
    assert d.features.tolist() == [[1, 2], [3, 4], [5, 6]]


def test_delimited_label_column_and_dictionary(tmp_path):
    p = tmp_path / "d.txt"
    p.write_text("x 1.5 2.5\ny  3.5 4.5\n\n")
    d = load_delimited(p, delimiter=" ", label_column=0, label_dictionary=["y", "x"])
    assert d.labels.tolist() == [1, 0]
    assert d.class_count == 2
    assert d.features.tolist() == [[1.5, 2.5], [3.5, 4.5]]
    with pytest.raises(DatasetError, match="unknown label"):
        load_delimited(p, delimiter=" ", label_column=0, label_dictionary=["y"])


@pytest.mark.parametrize("text,match", [("1,2,a\n3,b\n", "columns"), ("1,x,a\n", "could not convert"),
                                        ("1,nan,a\n", "non-finite")])
def test_delimited_errors(tmp_path, text, match):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(DatasetError, match=match):
        load_delimited(p)


def test_delimited_round_trip(tmp_path):
    d = LabeledDataset(np.array([[0.1, 2.0], [3.25, -4.0]]), np.array([1, 0]), 2, ["no", "yes"])
    save_delimited(d, tmp_path / "d.csv")
    back = load_delimited(tmp_path / "d.csv", header=True, label_dictionary=d.label_names)
    assert np.array_equal(back.features, d.features) and back.labels.tolist() == [1, 0]


def test_features_only(tmp_path):
    p = tmp_path / "f.csv"
    p.write_text("a,b,c\n1,2,z\n")
    assert load_features(p, header=True, drop_column=-1).tolist() == [[1.0, 2.0]]
    p.write_text("a,b\n")
    assert load_features(p, header=True).shape[0] == 0


def test_dataset_validation():
    with pytest.raises(DatasetError):
        LabeledDataset(np.zeros((2, 2)), np.array([0]), 2)
    with pytest.raises(DatasetError):
        LabeledDataset(np.zeros((2, 2)), np.array([0, 2]), 2)
    with pytest.raises(DatasetError):
        LabeledDataset(np.zeros(2), np.array([0, 1]), 2)


def test_split():
    d = LabeledDataset(np.arange(10)[:, None], np.arange(10) % 3, 3)
    a, b = split(d, 0.9, seed=4)
    assert (len(a), len(b)) == (9, 1)
    a2, b2 = split(d, 0.9, seed=4)
    assert np.array_equal(a.features, a2.features) and np.array_equal(b.features, b2.features)
    together = np.concatenate([a.features[:, 0], b.features[:, 0]])
    assert sorted(together.tolist()) == list(range(10))
    assert Counter(np.concatenate([a.labels, b.labels]).tolist()) == Counter(d.labels.tolist())
    tiny = LabeledDataset(np.zeros((3, 1)), np.zeros(3, dtype=int), 1)
    assert [len(p) for p in split(tiny, 0.99)] == [2, 1]
    with pytest.raises(DatasetError):
        split(d, 1.0)
