#!/usr/bin/env python3
"""Convert whitespace-separated data files without headers (Statlog
satellite, clave direction, german.data-numeric) to a header-rowed CSV.

The label column is assumed last unless --label-first is given; features are
named f0..f{d-1} and the label column 'label'. Multiple inputs concatenate
(e.g. sat.trn + sat.tst).

Usage: convert_spaced.py [--label-first] out.csv in1 [in2 ...]
"""

import csv
import sys


def main() -> int:
    args = sys.argv[1:]
    label_first = "--label-first" in args
    args = [a for a in args if a != "--label-first"]
    if len(args) < 2:
        sys.stderr.write(__doc__)
        return 2
    out_path, inputs = args[0], args[1:]

    rows = []
    for path in inputs:
        with open(path) as handle:
            for line in handle:
                cells = line.split()
                if cells:
                    rows.append(cells)
    if not rows:
        sys.stderr.write("no data rows\n")
        return 1
    width = len(rows[0])
    for r, cells in enumerate(rows):
        if len(cells) != width:
            sys.stderr.write(f"row {r + 1} has {len(cells)} cells, expected {width}\n")
            return 1

    with open(out_path, "w", newline="") as out:
        writer = csv.writer(out)
        features = [f"f{i}" for i in range(width - 1)]
        if label_first:
            writer.writerow(["label"] + features)
        else:
            writer.writerow(features + ["label"])
        writer.writerows(rows)
    sys.stderr.write(f"wrote {out_path} ({len(rows)} rows)\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
