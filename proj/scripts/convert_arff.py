#!/usr/bin/env python3
"""Convert a (dense) ARFF file to a header-rowed CSV, preserving attribute
names. Usage: convert_arff.py input.arff output.csv"""

import csv
import sys


def main() -> int:
    if len(sys.argv) != 3:
        sys.stderr.write("usage: convert_arff.py input.arff output.csv\n")
        return 2
    names = []
    rows = []
    in_data = False
    with open(sys.argv[1], errors="replace") as handle:
        for line in handle:
            line = line.strip()
            if not line or line.startswith("%"):
                continue
            lower = line.lower()
            if lower.startswith("@attribute"):
                # @attribute name type  (name may be quoted)
                rest = line.split(None, 1)[1].strip()
                if rest.startswith("'"):
                    name = rest[1 : rest.index("'", 1)]
                else:
                    name = rest.split()[0]
                names.append(name)
            elif lower.startswith("@data"):
                in_data = True
            elif in_data:
                rows.append(next(csv.reader([line])))
    if not names or not rows:
        sys.stderr.write("no attributes or no data rows found\n")
        return 1
    with open(sys.argv[2], "w", newline="") as out:
        writer = csv.writer(out)
        writer.writerow(names)
        writer.writerows(rows)
    sys.stderr.write(f"wrote {sys.argv[2]} ({len(rows)} rows, {len(names)} columns)\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
