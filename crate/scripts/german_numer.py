#!/usr/bin/env python3
"""Convert the UCI Statlog (German credit) german.data-numeric file to LIBSVM.

Class 2 (bad credit, 300 rows) becomes +1 and class 1 (good, 700 rows) -1.

    german_numer.py german.data-numeric data/german.numer
    german_numer.py --scale german.data-numeric data/german.numer_scale

--scale maps every feature linearly onto [-1, 1] using its min and max over
the file (constant features are dropped), as svm-scale does.
"""
import argparse


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--scale", action="store_true")
    ap.add_argument("src")
    ap.add_argument("dst")
    args = ap.parse_args()

    rows = []
    with open(args.src) as f:
        for line in f:
            vals = line.split()
            if not vals:
                continue
            *feats, cls = vals
            rows.append(([float(v) for v in feats], 1 if cls == "2" else -1))

    d = len(rows[0][0])
    lo = [min(r[0][j] for r in rows) for j in range(d)]
    hi = [max(r[0][j] for r in rows) for j in range(d)]

    with open(args.dst, "w") as out:
        for feats, y in rows:
            parts = []
            for j, v in enumerate(feats):
                if args.scale:
                    if hi[j] == lo[j]:
                        continue
                    v = -1.0 + 2.0 * (v - lo[j]) / (hi[j] - lo[j])
                if v != 0.0:
                    parts.append(f"{j + 1}:{v:.6g}")
            out.write(("+1" if y > 0 else "-1") + " " + " ".join(parts) + "\n")


if __name__ == "__main__":
    main()
