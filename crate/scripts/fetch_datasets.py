#!/usr/bin/env python3
"""Rebuild data/pendigits.csv and data/vowel.csv from the KEEL copies.

The KEEL repository mirrors the UCI datasets; the `keel-ds` wheel on PyPI
bundles the raw `.dat` files, so no network access beyond pip is needed.

  pendigits.csv  last 3498 rows of KEEL `penbased` (the UCI pendigits.tes
                 split), 16 integer features, label last
  vowel.csv      KEEL `vowel`, dropping the train/test flag, speaker and sex
                 columns, 10 features, label last
"""
import glob
import subprocess
import sys
import tempfile
import zipfile
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data"


def raw_rows(wheel, name):
    with zipfile.ZipFile(wheel) as z:
        text = z.read(f"keel_ds/data/balanced/raw/{name}.dat").decode()
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        rows.append([cell.strip() for cell in line.split(",")])
    return rows


def write(path, header, rows):
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(row) + "\n")


def main():
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "-q", "-d", tmp, "keel-ds==0.2.5"],
            check=True,
        )
        wheel = glob.glob(f"{tmp}/keel_ds-*.whl")[0]

        pen = raw_rows(wheel, "penbased")
        assert len(pen) == 10992, len(pen)
        pen = pen[-3498:]
        write(OUT / "pendigits.csv", [f"x{i}" for i in range(16)] + ["digit"], pen)

        vowel = raw_rows(wheel, "vowel")
        assert len(vowel) == 990, len(vowel)
        vowel = [row[3:] for row in vowel]
        write(OUT / "vowel.csv", [f"F{i}" for i in range(10)] + ["class"], vowel)


if __name__ == "__main__":
    main()
