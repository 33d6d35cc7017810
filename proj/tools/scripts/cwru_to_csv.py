#!/usr/bin/env python3
"""Convert CWRU drive-end .mat recordings into faultnet recording CSVs.

The mapping CSV lists one recording per row: ``mat,label`` where label is a
ten-way name (normal, IR007 .. IR021, B007 .. B021, OR007 .. OR021). Writes
one ``t,ch0`` CSV per recording plus manifest_ten_way.csv,
manifest_four_way.csv, manifest_binary.csv and manifest.csv (ten-way).
"""

import argparse
import csv
import re
import sys
from pathlib import Path

import numpy as np
from scipy.io import loadmat

TEN_WAY = re.compile(r"^(normal|(IR|B|OR)\d{3})$")


def drive_end(path):
    data = loadmat(path)
    keys = [k for k in data if k.endswith("DE_time")]
    if len(keys) != 1:
        raise ValueError(f"{path}: expected one *DE_time variable, found {keys}")
    return np.asarray(data[keys[0]], dtype=float).ravel()


def coarse(label):
    return "normal" if label == "normal" else re.match(r"[A-Z]+", label).group(0)


def write_manifest(path, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["file", "label"])
        w.writerows(rows)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mat-dir", type=Path, required=True, help="directory holding the .mat files")
    ap.add_argument("--mapping", type=Path, required=True, help="CSV with columns mat,label")
    ap.add_argument("--out", type=Path, required=True, help="output directory")
    ap.add_argument("--sample-rate", type=float, default=12000.0)
    args = ap.parse_args()

    with open(args.mapping, newline="") as f:
        mapping = list(csv.DictReader(f))
    if not mapping:
        sys.exit("mapping is empty")

    args.out.mkdir(parents=True, exist_ok=True)
    rows = []
    for entry in mapping:
        label = entry["label"].strip()
        if not TEN_WAY.match(label):
            sys.exit(f"unknown label '{label}' for {entry['mat']}")
        series = drive_end(args.mat_dir / entry["mat"])
        name = Path(entry["mat"]).stem + ".csv"
        t = np.arange(series.size) / args.sample_rate
        with open(args.out / name, "w") as f:
            f.write("t,ch0\n")
            for ti, v in zip(t.tolist(), series.tolist()):
                f.write(f"{ti!r},{v!r}\n")
        rows.append((name, label))
        print(f"{name}: {series.size} points, {label}")

    write_manifest(args.out / "manifest_ten_way.csv", rows)
    write_manifest(args.out / "manifest.csv", rows)
    write_manifest(args.out / "manifest_four_way.csv", [(n, coarse(l)) for n, l in rows])
    write_manifest(args.out / "manifest_binary.csv", [(n, "normal" if l == "normal" else "fault") for n, l in rows])


if __name__ == "__main__":
    main()
