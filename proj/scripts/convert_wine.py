#!/usr/bin/env python3
"""Merge the UCI red and white wine-quality CSVs (semicolon-separated) into
one comma-separated file. Usage:
convert_wine.py winequality-red.csv winequality-white.csv out.csv"""

import csv
import sys


def main() -> int:
    if len(sys.argv) != 4:
        sys.stderr.write(__doc__)
        return 2
    header = None
    rows = []
    for path in sys.argv[1:3]:
        with open(path) as handle:
            reader = csv.reader(handle, delimiter=";")
            file_header = [c.strip().strip('"') for c in next(reader)]
            if header is None:
                header = file_header
            elif header != file_header:
                sys.stderr.write("input headers differ\n")
                return 1
            rows.extend(reader)
    with open(sys.argv[3], "w", newline="") as out:
        writer = csv.writer(out)
        writer.writerow(header)
        writer.writerows(rows)
    sys.stderr.write(f"wrote {sys.argv[3]} ({len(rows)} rows)\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
