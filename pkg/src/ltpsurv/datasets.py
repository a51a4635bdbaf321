"""Loaders for the bundled example datasets.

The raw files are not shipped in the source tree; run
``python tools/fetch_datasets.py`` once (network required) to download and
convert them into ``ltpsurv/data/``. See ``ltpsurv/data/README.md`` for
provenance. Loaders raise :class:`DatasetNotFoundError` with instructions
when a file is absent, so analyses and tests depending on real data can
degrade gracefully.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .aft import AftDataset
from .inference import Observation

__all__ = [
    "DatasetNotFoundError",
    "data_dir",
    "load_nerve",
    "load_lung",
    "load_pbc",
]

DAYS_PER_YEAR = 365.25


class DatasetNotFoundError(FileNotFoundError):
    pass


def data_dir() -> Path:
    return Path(__file__).parent / "data"


def _open_rows(name: str):
    path = data_dir() / name
    if not path.exists():
        raise DatasetNotFoundError(
            f"{name} is not bundled in this checkout; run "
            f"'python tools/fetch_datasets.py' (network required) to fetch it"
        )
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _observation(row: dict, time: float) -> Observation:
    status = row["status"].strip().lower()
    if status == "exact":
        return Observation.exact(time)
    if status == "right":
        return Observation.right_censored(time)
    if status == "left":
        return Observation.left_censored(time)
    raise ValueError(f"unexpected status token {status!r}")


def load_nerve() -> np.ndarray:
    """Pulse-interval times along a nerve fibre, n=799.

    Units are 1/50 second (the original recording resolution), so values
    are half-integers.
    """
    rows = _open_rows("nerve.csv")
    return np.array([float(r["time"]) for r in rows])


def load_lung() -> AftDataset:
    """Advanced lung cancer survival, n=227 after removing the one patient
    with a missing performance score.

    Times are in days; covariates are age (years), sex (1=male, 2=female)
    and the ECOG performance score. Censored rows are right-censored.
    """
    rows = _open_rows("lung.csv")
    covs, obs = [], []
    for r in rows:
        covs.append([float(r["age"]), float(r["sex"]), float(r["ph_ecog"])])
        obs.append(_observation(r, float(r["time"])))
    return AftDataset.from_rows(covs, obs, names=("age", "sex", "ph_ecog"))


def load_pbc() -> AftDataset:
    """Primary biliary cirrhosis trial survival (complete cases).

    Times are converted from days to years. Covariates: age (years),
    log serum albumin, log serum bilirubin, edema score and log prothrombin
    time. Transplanted patients are right-censored at the transplant time.
    """
    rows = _open_rows("pbc.csv")
    covs, obs = [], []
    for r in rows:
        covs.append(
            [
                float(r["age"]),
                np.log(float(r["albumin"])),
                np.log(float(r["bilirubin"])),
                float(r["edema"]),
                np.log(float(r["protime"])),
            ]
        )
        obs.append(_observation(r, float(r["time"]) / DAYS_PER_YEAR))
    return AftDataset.from_rows(
        covs,
        obs,
        names=("age", "log_albumin", "log_bilirubin", "edema", "log_protime"),
    )
