#!/usr/bin/env python3
"""Export the UCI Cardiotocography workbook (CTG.xls, 'Raw Data' sheet) to
CSV. Requires pandas + xlrd. Usage: convert_ctg.py CTG.xls out.csv"""

import sys


def main() -> int:
    if len(sys.argv) != 3:
        sys.stderr.write(__doc__)
        return 2
    try:
        import pandas as pd
    except ImportError:
        sys.stderr.write("pandas is required (pip install pandas xlrd)\n")
        return 1
    frame = pd.read_excel(sys.argv[1], sheet_name="Raw Data")
    frame = frame.dropna(subset=["CLASS"])
    # Drop the filename/date bookkeeping columns if present.
    for col in ("FileName", "Date", "SegFile", "b", "e"):
        if col in frame.columns:
            frame = frame.drop(columns=col)
    frame.to_csv(sys.argv[2], index=False)
    sys.stderr.write(f"wrote {sys.argv[2]} ({len(frame)} rows)\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
