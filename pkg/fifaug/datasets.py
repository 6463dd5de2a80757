"""CSV datasets and synthetic series.

A dataset file has a header row and a `value` column, optionally preceded by either a
`timestamp` column (ISO-8601, chronological) or an `x` column (numeric abscissae).
Without `x`, the abscissae are the row indices 0, 1, 2, ...
"""
import csv
import datetime
import hashlib
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .errors import DatasetError
from .series import TimeSeries

logger = logging.getLogger(__name__)

GAMMA = [(1, 10), (2, 14), (3, 19), (4, 26), (5, 35), (6, 46), (7, 35), (8, 26), (9, 19), (10, 14), (11, 10)]
DATASET_KINDS = ("diurnal", "noise", "randomwalk", "ar1", "gamma")
AR1_COEFFICIENT = 0.8
DIURNAL_PERIOD = 24


@dataclass(frozen=True)
class Dataset:
    series: TimeSeries
    timestamps: Optional[List[str]] = None
    path: Optional[str] = None

    def __len__(self):
        return len(self.series)


def read_csv(path) -> Dataset:
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            rows = list(csv.DictReader(f))
            fieldnames = rows and list(rows[0].keys())
    except OSError as e:
        raise DatasetError(f"Cannot read dataset {path}: {e.strerror or e}") from e

    if not rows:
        raise DatasetError(f"Dataset {path} has no data rows")
    if "value" not in fieldnames:
        raise DatasetError(f"Dataset {path} has no 'value' column (columns: {', '.join(fieldnames)})")

    try:
        values = [float(row["value"]) for row in rows]
        timestamps = None
        if "timestamp" in fieldnames:
            timestamps = [row["timestamp"] for row in rows]
            parsed = [datetime.datetime.fromisoformat(t) for t in timestamps]
            if any(b <= a for a, b in zip(parsed, parsed[1:])):
                raise DatasetError(f"Timestamps in {path} are not in chronological order")
            x = np.arange(len(values), dtype=float)
        elif "x" in fieldnames:
            x = [float(row["x"]) for row in rows]
        else:
            x = np.arange(len(values), dtype=float)
        series = TimeSeries(x, values)
    except (TypeError, ValueError) as e:
        raise DatasetError(f"Malformed dataset {path}: {e}") from e

    logger.debug("Read %d points from %s", len(series), path)
    return Dataset(series=series, timestamps=timestamps, path=str(path))


def has_index_abscissae(series: TimeSeries):
    return np.array_equal(series.x, np.arange(len(series), dtype=float))


def write_csv(path, series: TimeSeries, timestamps=None, with_x=None):
    """Values with two decimals; `x` (written unless it is the row index) in round-trip form."""
    if with_x is None:
        with_x = timestamps is None and not has_index_abscissae(series)
    if timestamps is not None and len(timestamps) != len(series):
        raise ValueError(f"{len(timestamps)} timestamps for {len(series)} points")

    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            if timestamps is not None:
                writer.writerow(["timestamp", "value"])
                writer.writerows([t, f"{v:.2f}"] for t, v in zip(timestamps, series.y.tolist()))
            elif with_x:
                writer.writerow(["x", "value"])
                writer.writerows([repr(x), f"{v:.2f}"] for x, v in zip(series.x.tolist(), series.y.tolist()))
            else:
                writer.writerow(["value"])
                writer.writerows([f"{v:.2f}"] for v in series.y.tolist())
    except OSError as e:
        raise DatasetError(f"Cannot write dataset {path}: {e.strerror or e}") from e


def file_digest(path):
    try:
        with open(path, "rb") as f:
            return "sha256:" + hashlib.sha256(f.read()).hexdigest()
    except OSError as e:
        raise DatasetError(f"Cannot read {path}: {e.strerror or e}") from e


def generate(kind, n=168, seed=0) -> TimeSeries:
    """A synthetic series.

    - diurnal: 10 + 5 sin(2 pi t / 24) + 0.01 t + N(0, 0.3^2), hourly temperature-like
    - noise: iid standard Gaussian
    - randomwalk: cumulative sum of iid standard Gaussian steps
    - ar1: y_t = 0.8 y_(t-1) + N(0, 1)
    - gamma: the fixed 11-point trial set at x = 1..11 (ignores n and seed)
    """
    if kind == "gamma":
        return TimeSeries.from_points(GAMMA)
    if kind not in DATASET_KINDS:
        raise ValueError(f"Unknown dataset kind {kind!r}, expected one of: {', '.join(DATASET_KINDS)}")
    if n < 4:
        raise ValueError(f"n must be >= 4, got {n}")

    rng = np.random.default_rng(seed)
    t = np.arange(n, dtype=float)
    if kind == "diurnal":
        values = 10 + 5 * np.sin(2 * np.pi * t / DIURNAL_PERIOD) + 0.01 * t + rng.normal(0, 0.3, n)
    elif kind == "noise":
        values = rng.standard_normal(n)
    elif kind == "randomwalk":
        values = np.cumsum(rng.standard_normal(n))
    else:
        shocks = rng.standard_normal(n)
        values = np.empty(n)
        values[0] = shocks[0] / np.sqrt(1 - AR1_COEFFICIENT ** 2)
        for i in range(1, n):
            values[i] = AR1_COEFFICIENT * values[i - 1] + shocks[i]
    return TimeSeries(t, values)
