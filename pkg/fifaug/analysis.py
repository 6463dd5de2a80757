"""Statistics shared by the strategies and the forecasting pipeline.

Hurst exponent by rescaled-range analysis, the augmented Dickey-Fuller unit-root test
(constant, no trend) and point-forecast error metrics.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np
from scipy.special import gammaln
from scipy.stats import norm

from . import perflog
from .errors import (
    ConstantSeries,
    EmptyInput,
    LengthMismatch,
    SeriesTooShort,
    SeriesTooShortForHurst,
    SingularRegression,
)

logger = logging.getLogger(__name__)

HURST_MIN_LENGTH = 20
HURST_WINDOW_COUNT = 12
ADF_MIN_LENGTH = 20
STATIONARY_P_VALUE = 0.05

# MacKinnon (1994, updated 2010) p-value surface for the constant-only ADF regression.
_ADF_TAU_MAX = 2.74
_ADF_TAU_MIN = -18.83
_ADF_TAU_STAR = -1.61
_ADF_TAU_SMALLP = [2.1659, 1.4412, 0.038269]
_ADF_TAU_LARGEP = [1.7339, 0.93202, -0.12745, -0.010368]

# MacKinnon (2010) finite-sample critical values: polynomial in 1/nobs.
_ADF_CRITICAL_SURFACE = {
    "1%": [-3.43035, -6.5393, -16.786, -79.433],
    "5%": [-2.86154, -2.8903, -4.234, -40.040],
    "10%": [-2.56677, -1.5384, -2.809, 0.0],
}


@dataclass(frozen=True)
class HurstEstimate:
    h: float
    window_sizes: List[int]
    rs_values: List[float]
    regression_r2: float


@dataclass(frozen=True)
class AdfResult:
    statistic: float
    p_value: float
    lags: int
    nobs: int = 0
    critical_values: Dict[str, float] = field(default_factory=dict)

    @property
    def is_stationary(self):
        return self.p_value < STATIONARY_P_VALUE

    def to_dict(self):
        return {
            "statistic": self.statistic,
            "p_value": self.p_value,
            "lags": self.lags,
            "nobs": self.nobs,
            "critical_values": dict(self.critical_values),
            "is_stationary": self.is_stationary,
        }


@dataclass(frozen=True)
class Metrics:
    rmse: float
    mse: float
    mae: float

    def to_dict(self):
        return {"rmse": self.rmse, "mse": self.mse, "mae": self.mae}

    @staticmethod
    def from_dict(d):
        return Metrics(rmse=d["rmse"], mse=d["mse"], mae=d["mae"])


def _window_sizes(n, min_window):
    if n // 2 < min_window:
        return np.array([], dtype=int)
    sizes = np.geomspace(min_window, n // 2, num=HURST_WINDOW_COUNT)
    return np.unique(np.floor(sizes).astype(int))


def _rescaled_range(values, size):
    """Mean R/S over the non-overlapping windows of `size`; None when every window is flat."""
    n_windows = len(values) // size
    windows = values[:n_windows * size].reshape(n_windows, size)
    deviations = np.cumsum(windows - windows.mean(axis=1, keepdims=True), axis=1)
    ranges = deviations.max(axis=1) - deviations.min(axis=1)
    stds = windows.std(axis=1)
    usable = stds > 0
    if not usable.any():
        return None
    return float(np.mean(ranges[usable] / stds[usable]))


def expected_rescaled_range(size):
    """Anis-Lloyd expectation of R/S for `size` independent Gaussian samples."""
    i = np.arange(1, size)
    gamma_ratio = np.exp(gammaln((size - 1) / 2) - gammaln(size / 2)) / np.sqrt(np.pi)
    return (size - 0.5) / size * gamma_ratio * np.sum(np.sqrt((size - i) / i))


@perflog.timed_as("hurst")
def hurst_exponent(values, min_window=8, relaxed=False, corrected=True) -> HurstEstimate:
    """Rescaled-range estimate of the Hurst exponent.

    Window sizes run geometrically from `min_window` to n/2; the exponent is the slope of
    log(R/S) against log(size). With `corrected`, the regression runs on R/S in excess of
    its white-noise expectation and the exponent is 0.5 plus that slope, which removes
    the upward bias of small windows.

    `relaxed` is for short raw segments: any length is accepted as long as two window
    sizes remain, trying windows down to 4 and then 2.
    """
    values = np.asarray(values, dtype=float)
    if len(values) > 0 and np.ptp(values) == 0:
        raise ConstantSeries("Hurst exponent is undefined for a constant series")

    if relaxed:
        minimum_sizes = 2
        candidates = [min(min_window, 4), 2]
    else:
        if len(values) < HURST_MIN_LENGTH:
            raise SeriesTooShortForHurst(f"Hurst exponent needs at least {HURST_MIN_LENGTH} points, got {len(values)}")
        minimum_sizes = 4
        candidates = [min_window]

    for smallest in candidates:
        sizes, rs = [], []
        for size in _window_sizes(len(values), smallest):
            value = _rescaled_range(values, size)
            if value is not None and value > 0:
                sizes.append(int(size))
                rs.append(value)
        if len(sizes) >= minimum_sizes:
            break
    else:
        raise SeriesTooShortForHurst(
            f"{len(values)} points leave fewer than {minimum_sizes} usable window sizes")

    log_sizes, log_rs = np.log(sizes), np.log(rs)
    if corrected:
        log_rs = log_rs - np.log([expected_rescaled_range(size) for size in sizes])
    slope, intercept = np.polyfit(log_sizes, log_rs, 1)
    fitted = slope * log_sizes + intercept
    total = np.sum((log_rs - log_rs.mean()) ** 2)
    r2 = 1.0 - np.sum((log_rs - fitted) ** 2) / total if total > 0 else 1.0
    h = 0.5 + slope if corrected else slope
    return HurstEstimate(h=float(h), window_sizes=sizes, rs_values=rs, regression_r2=float(r2))


def schwert_lags(n):
    return int(np.floor(12.0 * (n / 100.0) ** 0.25))


def mackinnon_p_value(statistic):
    """Approximate p-value of an ADF tau statistic, constant-only regression."""
    if statistic > _ADF_TAU_MAX:
        return 1.0
    if statistic < _ADF_TAU_MIN:
        return 0.0
    coefficients = _ADF_TAU_SMALLP if statistic <= _ADF_TAU_STAR else _ADF_TAU_LARGEP
    return float(norm.cdf(np.polyval(coefficients[::-1], statistic)))


def mackinnon_critical_values(nobs):
    inverse = 1.0 / nobs
    return {level: float(np.polyval(surface[::-1], inverse)) for level, surface in _ADF_CRITICAL_SURFACE.items()}


@perflog.timed_as("adf")
def adf_test(values, lags=None) -> AdfResult:
    """Augmented Dickey-Fuller test with a constant.

    Regresses dy_t on [1, y_{t-1}, dy_{t-1} .. dy_{t-lags}]. Without an explicit lag count
    the Schwert rule floor(12 (n/100)^(1/4)) is used, capped so the regression keeps
    enough observations.
    """
    values = np.asarray(values, dtype=float)
    n = len(values)
    if n < ADF_MIN_LENGTH:
        raise SeriesTooShort(f"ADF test needs at least {ADF_MIN_LENGTH} points, got {n}")
    if lags is None:
        lags = min(schwert_lags(n), n // 2 - 2)
    if lags < 0:
        raise ValueError(f"lags must be >= 0, got {lags}")

    diffs = np.diff(values)
    nobs = len(diffs) - lags
    target = diffs[lags:]
    columns = [np.ones(nobs), values[lags:-1]]
    columns += [diffs[lags - k:len(diffs) - k] for k in range(1, lags + 1)]
    design = np.column_stack(columns)

    dof = nobs - design.shape[1]
    if dof <= 0 or np.linalg.matrix_rank(design) < design.shape[1]:
        raise SingularRegression(f"ADF regression with {lags} lags on {n} points is singular")

    beta, _, _, _ = np.linalg.lstsq(design, target, rcond=None)
    residuals = target - design @ beta
    sigma2 = residuals @ residuals / dof
    covariance = sigma2 * np.linalg.inv(design.T @ design)
    stderr = np.sqrt(covariance[1, 1])
    if not np.isfinite(stderr) or stderr == 0:
        raise SingularRegression("ADF regression has a zero standard error on the level term")

    statistic = float(beta[1] / stderr)
    return AdfResult(
        statistic=statistic,
        p_value=mackinnon_p_value(statistic),
        lags=lags,
        nobs=nobs,
        critical_values=mackinnon_critical_values(nobs),
    )


def metrics(predicted, actual) -> Metrics:
    predicted = np.asarray(predicted, dtype=float)
    actual = np.asarray(actual, dtype=float)
    if predicted.shape != actual.shape:
        raise LengthMismatch(f"{len(predicted)} predictions for {len(actual)} actual values")
    if len(actual) == 0:
        raise EmptyInput("Cannot compute metrics of empty series")
    errors = predicted - actual
    mse = float(np.mean(errors ** 2))
    return Metrics(rmse=float(np.sqrt(mse)), mse=mse, mae=float(np.mean(np.abs(errors))))


def rmse(predicted, actual):
    return metrics(predicted, actual).rmse
