#!/usr/bin/env python3
"""Rebuilds data/uk_cases.csv from the public Our World in Data dataset.

Requires network access. Downloads the OWID COVID-19 compact dataset,
extracts the United Kingdom's smoothed new cases per million between
2022-03-01 and 2023-02-28, and writes them in the toolkit's `date,cases`
format. The smoothed column is used because the raw per-day column contains
reporting zeros that a log-scale pipeline cannot ingest.

Usage: python3 scripts/fetch_uk_data.py [out.csv]
"""

import csv
import io
import sys
import urllib.request

URL = "https://catalog.ourworldindata.org/garden/covid/latest/compact/compact.csv"
COUNTRY = "United Kingdom"
COLUMN = "new_cases_smoothed_per_million"
START = "2022-03-01"
END = "2023-02-28"


def main():
    out_path = sys.argv[1] if len(sys.argv) > 1 else "data/uk_cases.csv"
    print(f"downloading {URL} ...")
    with urllib.request.urlopen(URL) as resp:
        text = io.TextIOWrapper(resp, encoding="utf-8")
        reader = csv.DictReader(text)
        rows = [(r["date"], r[COLUMN]) for r in reader
                if r.get("country") == COUNTRY and START <= r["date"] <= END
                and r.get(COLUMN)]
    rows.sort()
    if not rows:
        raise SystemExit("no rows matched; the upstream schema may have changed")
    with open(out_path, "w", newline="") as f:
        f.write("date,cases\n")
        for date, cases in rows:
            f.write(f"{date},{cases}\n")
    print(f"wrote {out_path}: {len(rows)} rows {rows[0][0]} .. {rows[-1][0]}")


if __name__ == "__main__":
    main()
