"""Build the tabular benchmark files under data/ from two PyPI dataset bundles.

    pip install keel-ds imbalanced-databases
    python scripts/prepare_data.py [--out data]

Every output is a comma-separated file with a header row and the class label in
the last column.  MNIST and the full multi-class Shuttle set are not shipped by
either bundle; drop the original files into data/mnist/ and data/shuttle/ (see
README) to enable those benchmarks.
"""
import argparse
import csv
from collections import Counter
from pathlib import Path

import imbalanced_databases
import keel_ds

KEEL = Path(keel_ds.__file__).parent / "data"
IMBDB = Path(imbalanced_databases.__file__).parent / "data"

# UCI ecoli.data is sorted by class; (label, first row, last row), 1-indexed.
ECOLI_BLOCKS = [
    ("cp", 1, 143), ("im", 144, 220), ("imS", 221, 222), ("imL", 223, 224),
    ("imU", 225, 259), ("om", 260, 279), ("omL", 280, 284), ("pp", 285, 336),
]


def read_keel(path):
    rows = []
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        rows.append([c.strip() for c in line.split(",")])
    return rows


def write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def numeric_header(width):
    return [f"x{i}" for i in range(width)] + ["class"]


def simple(name, out):
    rows = read_keel(KEEL / "balanced" / "raw" / f"{name}.dat")
    write_csv(out / f"{name}.csv", numeric_header(len(rows[0]) - 1), rows)


def vowel(out):
    # columns: train/test flag, speaker, sex, ten formant features, class.
    # All 990 rows go into one file; the benchmark draws its own random split.
    rows = read_keel(KEEL / "balanced" / "raw" / "vowel.dat")
    assert len(rows) == 990
    write_csv(out / "vowel.csv", numeric_header(10), [r[3:] for r in rows])


def satimage(out):
    for part, fname in (("train", "sat.trn.txt"), ("test", "sat.tst.txt")):
        rows = [line.split() for line in (IMBDB / "satimage" / fname).read_text().splitlines() if line.strip()]
        assert all(len(r) == 37 for r in rows)
        write_csv(out / f"satimage_{part}.csv", numeric_header(36), rows)


def ecoli(out):
    raw = KEEL / "imbalanced" / "raw"
    base = read_keel(raw / "ecoli1.dat")
    assert len(base) == 336
    labels = [None] * 336
    for label, lo, hi in ECOLI_BLOCKS:
        for i in range(lo - 1, hi):
            labels[i] = label

    def key(row):
        return tuple(round(float(v), 2) for v in row[:7])

    def positives(name):
        return [key(r) for r in read_keel(raw / f"{name}.dat") if r[7] == "positive"]

    def block(label):
        return [key(base[i]) for i in range(336) if labels[i] == label]

    # ecoli1..4 are the one-vs-rest sets for im, pp, imU, om
    for name, label in (("ecoli1", "im"), ("ecoli2", "pp"), ("ecoli3", "imU"), ("ecoli4", "om")):
        assert Counter(positives(name)) == Counter(block(label)), name
    # omL rows all carry lip = 1.0; the single chg = 1.0 row is the first imL row
    assert all(r[2] == 1.0 for r in block("omL"))
    assert [i for i in range(336) if key(base[i])[3] == 1.0] == [222]
    write_csv(out / "ecoli.csv", numeric_header(7), [r[:7] + [lab] for r, lab in zip(base, labels)])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name in ("iris", "wine", "vehicle", "letter"):
        simple(name, args.out)
    vowel(args.out)
    satimage(args.out)
    ecoli(args.out)


if __name__ == "__main__":
    main()
