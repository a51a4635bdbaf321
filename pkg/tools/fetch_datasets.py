#!/usr/bin/env python3
"""Download and convert the example datasets into src/ltpsurv/data/.

Needs network access. Each dataset is validated (row counts, value ranges)
before anything is written, and existing files are only replaced with
--force. See src/ltpsurv/data/README.md for provenance notes.

Usage:
    python tools/fetch_datasets.py [--dest DIR] [--only nerve,lung,pbc] [--force]
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import urllib.request
from pathlib import Path

NERVE_URLS = [
    "https://www.stat.cmu.edu/~larry/all-of-statistics/=data/nerve.dat",
]
LUNG_URLS = [
    "https://vincentarelbundock.github.io/Rdatasets/csv/survival/lung.csv",
    "https://vincentarelbundock.github.io/Rdatasets/csv/survival/cancer.csv",
]
PBC_URLS = [
    "https://vincentarelbundock.github.io/Rdatasets/csv/survival/pbc.csv",
]

DEFAULT_DEST = Path(__file__).resolve().parent.parent / "src" / "ltpsurv" / "data"


def download(urls: list[str]) -> str:
    last_error = None
    for url in urls:
        try:
            print(f"  fetching {url}")
            with urllib.request.urlopen(url, timeout=60) as resp:
                return resp.read().decode("utf-8")
        except Exception as exc:  # try the next mirror
            last_error = exc
            print(f"    failed: {exc}")
    raise SystemExit(f"could not download any of {urls}: {last_error}")


def _get(row: dict, *names: str) -> str:
    for name in names:
        if name in row and row[name] not in (None, ""):
            return row[name]
    return ""


def convert_nerve(dest: Path) -> None:
    text = download(NERVE_URLS)
    seconds = [float(tok) for tok in text.split()]
    if len(seconds) != 799:
        raise SystemExit(f"nerve: expected 799 values, got {len(seconds)}")
    # stored in units of 1/50 second, the recording resolution
    times = [round(50.0 * s, 6) for s in seconds]
    if min(times) <= 0:
        raise SystemExit("nerve: nonpositive interval after conversion")
    with open(dest / "nerve.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time", "status"])
        for t in times:
            writer.writerow([f"{t:g}", "exact"])
    print(f"  wrote nerve.csv ({len(times)} rows)")


def convert_lung(dest: Path) -> None:
    text = download(LUNG_URLS)
    rows = list(csv.DictReader(io.StringIO(text)))
    kept = []
    for i, row in enumerate(rows, start=1):
        ph_ecog = _get(row, "ph.ecog", "ph_ecog")
        if ph_ecog in ("", "NA"):
            continue
        time = float(_get(row, "time"))
        status = int(float(_get(row, "status")))
        kept.append(
            {
                "id": _get(row, "rownames", "") or str(i),
                "time": f"{time:g}",
                "status": "exact" if status == 2 else "right",
                "age": _get(row, "age"),
                "sex": _get(row, "sex"),
                "ph_ecog": ph_ecog,
            }
        )
    if len(kept) != 227:
        raise SystemExit(f"lung: expected 227 complete rows, got {len(kept)}")
    with open(dest / "lung.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["id", "time", "status", "age", "sex", "ph_ecog"])
        writer.writeheader()
        writer.writerows(kept)
    print(f"  wrote lung.csv ({len(kept)} rows)")


def convert_pbc(dest: Path) -> None:
    text = download(PBC_URLS)
    rows = list(csv.DictReader(io.StringIO(text)))
    if len(rows) != 418:
        raise SystemExit(f"pbc: expected 418 raw rows, got {len(rows)}")
    kept, dropped = [], 0
    for i, row in enumerate(rows, start=1):
        fields = {
            "age": _get(row, "age"),
            "albumin": _get(row, "albumin"),
            "bilirubin": _get(row, "bili", "bilirubin"),
            "edema": _get(row, "edema"),
            "protime": _get(row, "protime"),
        }
        if any(v in ("", "NA") for v in fields.values()):
            dropped += 1
            continue
        status = int(float(_get(row, "status")))
        kept.append(
            {
                "id": _get(row, "id", "rownames") or str(i),
                "time": f"{float(_get(row, 'time')):g}",
                # transplant (1) is right-censoring at the transplant time
                "status": "exact" if status == 2 else "right",
                **fields,
            }
        )
    print(f"  pbc: dropped {dropped} rows with missing covariates")
    with open(dest / "pbc.csv", "w", newline="") as fh:
        writer = csv.DictWriter(
            fh,
            fieldnames=["id", "time", "status", "age", "albumin", "bilirubin", "edema", "protime"],
        )
        writer.writeheader()
        writer.writerows(kept)
    print(f"  wrote pbc.csv ({len(kept)} rows)")


CONVERTERS = {"nerve": convert_nerve, "lung": convert_lung, "pbc": convert_pbc}
OUTPUTS = {"nerve": "nerve.csv", "lung": "lung.csv", "pbc": "pbc.csv"}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dest", type=Path, default=DEFAULT_DEST)
    parser.add_argument("--only", default="nerve,lung,pbc")
    parser.add_argument("--force", action="store_true")
    args = parser.parse_args()
    args.dest.mkdir(parents=True, exist_ok=True)
    for name in (part.strip() for part in args.only.split(",")):
        if name not in CONVERTERS:
            raise SystemExit(f"unknown dataset '{name}'")
        target = args.dest / OUTPUTS[name]
        if target.exists() and not args.force:
            print(f"{name}: {target} already exists (use --force to refresh)")
            continue
        print(f"{name}:")
        CONVERTERS[name](args.dest)
    return 0


if __name__ == "__main__":
    sys.exit(main())
