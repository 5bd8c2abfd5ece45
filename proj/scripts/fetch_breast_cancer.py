#!/usr/bin/env python3
"""Materialize the Wisconsin Diagnostic Breast Cancer dataset as a CSV.

Uses scikit-learn's bundled copy (no network access needed): 569 rows, 30
numeric features, diagnosis M (malignant, the positive class) or B (benign).
The column names match manifests/breast_cancer.manifest.
"""

import csv
import os
import sys


def main() -> int:
    out_path = sys.argv[1] if len(sys.argv) > 1 else "data/breast_cancer.csv"
    try:
        from sklearn.datasets import load_breast_cancer
    except ImportError:
        sys.stderr.write(
            "scikit-learn is required (pip install scikit-learn), or download\n"
            "wdbc.data from the UCI repository and convert it by hand.\n"
        )
        return 1

    bunch = load_breast_cancer()
    os.makedirs(os.path.dirname(out_path) or ".", exist_ok=True)
    with open(out_path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["diagnosis"] + list(bunch.feature_names))
        for row, target in zip(bunch.data, bunch.target):
            # sklearn encodes 0 = malignant, 1 = benign.
            diagnosis = "M" if target == 0 else "B"
            writer.writerow([diagnosis] + [format(float(v), ".17g") for v in row])
    sys.stderr.write(f"wrote {out_path} ({len(bunch.data)} rows)\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
