"""Preparing a series for forecasting: min-max scaling, stationarity transforms,
a chronological train/test split and sliding-window framing."""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .analysis import AdfResult, adf_test
from .errors import (
    DegenerateInverse,
    DomainViolation,
    SeriesTooShort,
    SingularRegression,
    WindowTooLarge,
)
from .series import TimeSeries

logger = logging.getLogger(__name__)

DEFAULT_TRAIN_RATIO = 0.7


@dataclass(frozen=True)
class NormParams:
    data_min: float
    data_max: float
    a: float = 0.0
    b: float = 1.0

    @property
    def degenerate(self):
        return self.data_max == self.data_min

    def to_dict(self):
        return {"data_min": self.data_min, "data_max": self.data_max, "a": self.a, "b": self.b,
                "degenerate": self.degenerate}

    @staticmethod
    def from_dict(d):
        return NormParams(data_min=d["data_min"], data_max=d["data_max"], a=d["a"], b=d["b"])


def normalize(values, a=0.0, b=1.0):
    """Map [min, max] of `values` affinely onto [a, b]; a constant input maps to (a + b) / 2."""
    values = np.asarray(values, dtype=float)
    if len(values) == 0:
        raise ValueError("Cannot normalize an empty series")
    if not b > a:
        raise ValueError(f"Target interval needs a < b, got [{a}, {b}]")
    params = NormParams(data_min=float(values.min()), data_max=float(values.max()), a=float(a), b=float(b))
    if params.degenerate:
        logger.warning("Normalizing a constant series; every value maps to the interval midpoint")
        return np.full(len(values), (a + b) / 2), params
    scaled = (values - params.data_min) / (params.data_max - params.data_min)
    return a + (b - a) * scaled, params


def denormalize(values, params: NormParams):
    if params.degenerate:
        raise DegenerateInverse("Parameters of a constant series cannot be inverted")
    values = np.asarray(values, dtype=float)
    return params.data_min + (values - params.a) / (params.b - params.a) * (params.data_max - params.data_min)


class TransformMethod(Enum):
    NONE = "none"
    LOG = "log"
    SQRT = "sqrt"
    LINEAR_DETREND = "linear_detrend"

    @staticmethod
    def from_string(s):
        if s is None:
            return TransformMethod.NONE
        if isinstance(s, TransformMethod):
            return s
        try:
            return TransformMethod(s.lower())
        except ValueError:
            choices = ", ".join(m.value for m in TransformMethod)
            raise ValueError(f"Unknown transform {s!r}, expected one of: {choices}") from None


@dataclass(frozen=True)
class TransformRecord:
    method: TransformMethod
    slope: float = 0.0
    intercept: float = 0.0
    adf_before: Optional[AdfResult] = None
    adf_after: Optional[AdfResult] = None

    def to_dict(self):
        return {
            "method": self.method.value,
            "slope": self.slope,
            "intercept": self.intercept,
            "adf_before": self.adf_before.to_dict() if self.adf_before else None,
            "adf_after": self.adf_after.to_dict() if self.adf_after else None,
        }


def _adf_or_none(values):
    try:
        return adf_test(values)
    except (SeriesTooShort, SingularRegression) as e:
        logger.debug("No ADF result: %s", e)
        return None


def _check_domain(values, method):
    if method == TransformMethod.LOG and np.any(values <= 0):
        raise DomainViolation("Log transform needs strictly positive values")
    if method == TransformMethod.SQRT and np.any(values < 0):
        raise DomainViolation("Square-root transform needs non-negative values")


def apply_transform(values, method, with_adf=True):
    """Transform `values`; the record keeps what is needed to invert it and the ADF
    results before and after (None where the test does not apply)."""
    method = TransformMethod.from_string(method)
    values = np.asarray(values, dtype=float)
    _check_domain(values, method)

    slope = intercept = 0.0
    if method == TransformMethod.LOG:
        transformed = np.log(values)
    elif method == TransformMethod.SQRT:
        transformed = np.sqrt(values)
    elif method == TransformMethod.LINEAR_DETREND:
        index = np.arange(len(values), dtype=float)
        slope, intercept = (float(v) for v in np.polyfit(index, values, 1))
        transformed = values - (slope * index + intercept)
    else:
        transformed = values.copy()

    record = TransformRecord(
        method=method,
        slope=slope,
        intercept=intercept,
        adf_before=_adf_or_none(values) if with_adf else None,
        adf_after=_adf_or_none(transformed) if with_adf else None,
    )
    return transformed, record


def invert_transform(values, record: TransformRecord, offset=0):
    """Undo `record` on `values`; `offset` is the index of values[0] in the transformed series."""
    values = np.asarray(values, dtype=float)
    if record.method == TransformMethod.LOG:
        return np.exp(values)
    if record.method == TransformMethod.SQRT:
        return np.square(values)
    if record.method == TransformMethod.LINEAR_DETREND:
        index = np.arange(offset, offset + len(values), dtype=float)
        return values + record.slope * index + record.intercept
    return values.copy()


def select_transform(values):
    """NONE if the series is already stationary, else the applicable transform whose
    result has the smallest ADF p-value, whether or not it beats the raw series.

    NONE is also the answer when no transform applies.
    """
    values = np.asarray(values, dtype=float)
    before = adf_test(values)
    if before.is_stationary:
        return TransformMethod.NONE

    best_method, best_p = TransformMethod.NONE, math.inf
    for method in (TransformMethod.LOG, TransformMethod.SQRT, TransformMethod.LINEAR_DETREND):
        try:
            _check_domain(values, method)
            transformed, _ = apply_transform(values, method, with_adf=False)
            after = adf_test(transformed)
        except DomainViolation:
            continue
        except SingularRegression as e:
            logger.info("Skipping %s transform: %s", method.value, e)
            continue
        logger.debug("ADF p-value after %s: %.4g", method.value, after.p_value)
        if after.p_value < best_p:
            best_method, best_p = method, after.p_value
    return best_method


def chronological_split(series, ratio=DEFAULT_TRAIN_RATIO):
    """First ceil(ratio * n) points for training, the rest for testing, order preserved."""
    if not 0 < ratio < 1:
        raise ValueError(f"ratio must be in (0, 1), got {ratio}")
    n = len(series)
    if n < 10:
        raise SeriesTooShort(f"Need at least 10 points to split, got {n}")
    n_train = math.ceil(ratio * n - 1e-9)
    if n_train >= n:
        raise ValueError(f"ratio {ratio} leaves no test points out of {n}")
    if isinstance(series, TimeSeries):
        return series.slice(0, n_train - 1), series.slice(n_train, n - 1)
    values = np.asarray(series, dtype=float)
    return values[:n_train], values[n_train:]


@dataclass(frozen=True, eq=False)
class SupervisedSet:
    inputs: np.ndarray
    targets: np.ndarray

    @property
    def window_size(self):
        return self.inputs.shape[1]

    def __len__(self):
        return len(self.targets)


def make_windows(values, input_data_points) -> SupervisedSet:
    """Window i is values[i:i + w] with target values[i + w]."""
    values = np.asarray(values, dtype=float)
    w = int(input_data_points)
    if w < 1:
        raise ValueError(f"input_data_points must be >= 1, got {w}")
    if w >= len(values):
        raise WindowTooLarge(f"Window of {w} needs more than {len(values)} values")
    inputs = np.lib.stride_tricks.sliding_window_view(values, w)[:-1].copy()
    return SupervisedSet(inputs=inputs, targets=values[w:].copy())
