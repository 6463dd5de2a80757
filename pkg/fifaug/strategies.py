"""The three ways of choosing vertical scaling factors, and the augmentation driver.

- CHS: random constant s, keeping the candidate whose Hurst exponent is closest to that of
  the segment's linear interpolant.
- CVS: a study over a constant s minimizing the RMSE to the linear interpolant.
- FS: a closed-form s_i per interval from the data increments.
- LINEAR: evenly spaced points on the piecewise-linear interpolant, as the baseline.
"""
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from . import analysis
from ._private.seeds import derive_seed
from .errors import AllPointsEqual, FactorMismatch, SeriesTooShort
from .fif import DEFAULT_N_INTERPOLATION, InterpolatedSeries, evaluate_linear, generate_fif, generate_linear
from .samplers import IntRange
from .segmentation import DEFAULT_SEQUENCE_SIZE, reunite, split
from .series import TimeSeries
from .study import Study

logger = logging.getLogger(__name__)

MAX_SCALING = 1 - 1e-6
TIE_TOLERANCE = 1e-12


class StrategyKind(Enum):
    CHS = "chs"
    CVS = "cvs"
    FS = "fs"
    LINEAR = "linear"

    @staticmethod
    def from_string(s):
        if isinstance(s, StrategyKind):
            return s
        try:
            return StrategyKind(s.lower())
        except ValueError:
            choices = ", ".join(k.value for k in StrategyKind)
            raise ValueError(f"Unknown strategy {s!r}, expected one of: {choices}") from None


@dataclass
class StrategyConfig:
    """How to augment a series.

    `sequence_size` None means 10 for CHS, CVS and LINEAR, and an optimized size for FS.
    `iterations` is the CHS candidate count, `trials` the CVS study length and
    `sequence_trials` the length of the sequence-size study.
    """

    kind: StrategyKind = StrategyKind.CVS
    n_interpolation: int = DEFAULT_N_INTERPOLATION
    sequence_size: Optional[int] = None
    s_range: Tuple[float, float] = (-1.0, 1.0)
    iterations: int = 15
    trials: int = 15
    sequence_trials: int = 50
    seed: int = 0
    strict: bool = False

    def __post_init__(self):
        self.kind = StrategyKind.from_string(self.kind)
        self.s_range = tuple(float(v) for v in self.s_range)
        if self.n_interpolation < 1:
            raise ValueError(f"n_interpolation must be >= 1, got {self.n_interpolation}")
        if self.sequence_size is not None and self.sequence_size < 3:
            raise ValueError(f"sequence_size must be >= 3, got {self.sequence_size}")
        low, high = self.s_range
        if not -1 <= low < high <= 1:
            raise ValueError(f"s_range must satisfy -1 <= low < high <= 1, got {self.s_range}")
        for name in ("iterations", "trials", "sequence_trials"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")

    def to_dict(self):
        return {
            "kind": self.kind.value,
            "n_interpolation": self.n_interpolation,
            "sequence_size": self.sequence_size,
            "s_range": list(self.s_range),
            "iterations": self.iterations,
            "trials": self.trials,
            "sequence_trials": self.sequence_trials,
            "seed": self.seed,
            "strict": self.strict,
        }

    @staticmethod
    def from_dict(d):
        return StrategyConfig(**d)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @staticmethod
    def from_json(s):
        return StrategyConfig.from_dict(json.loads(s))


@dataclass(frozen=True, eq=False)
class ScalingVector:
    values: np.ndarray
    constant: bool


def clamp_scaling(values, warn=True):
    """Clip scaling factors into [-(1 - 1e-6), 1 - 1e-6]."""
    values = np.asarray(values, dtype=float)
    clamped = np.clip(values, -MAX_SCALING, MAX_SCALING)
    if warn and np.any(clamped != values):
        logger.warning("Clamped vertical scaling factors %s to +/-%s",
                       values[clamped != values].tolist(), MAX_SCALING)
    return clamped


def _hurst(values):
    return analysis.hurst_exponent(values, relaxed=len(values) < analysis.HURST_MIN_LENGTH).h


def _linear_rmse(segment, interpolated: InterpolatedSeries):
    return analysis.rmse(interpolated.y, evaluate_linear(segment, interpolated.x))


# CHS

@dataclass(frozen=True)
class HurstCandidate:
    s: float
    hurst: float
    distance: float


@dataclass(frozen=True)
class HurstSearch:
    result: InterpolatedSeries
    initial_hurst: float
    candidates: List[HurstCandidate]
    best_index: int

    @property
    def best(self):
        return self.candidates[self.best_index]


def _hurst_density(segment: TimeSeries, n_interpolation):
    """Points per gap at which CHS measures exponents: `n_interpolation`, raised to the
    default when that leaves fewer points than the standard estimator needs."""
    if len(segment) + (len(segment) - 1) * n_interpolation < analysis.HURST_MIN_LENGTH:
        return max(n_interpolation, DEFAULT_N_INTERPOLATION)
    return n_interpolation


def initial_hurst(segment: TimeSeries, n_interpolation=DEFAULT_N_INTERPOLATION):
    """Hurst exponent of the segment's linear interpolant, sampled at the x positions every
    candidate is sampled at and measured with the same estimator.

    The attractor's x positions do not depend on s, so a zero scaling factor scores a
    distance of 0 against this target.
    """
    x = generate_fif(segment, 0.0, _hurst_density(segment, n_interpolation)).x
    return _hurst(evaluate_linear(segment, x))


def _candidate_hurst(segment, s, interpolated: InterpolatedSeries):
    density = _hurst_density(segment, interpolated.n_interpolation)
    if density != interpolated.n_interpolation:
        interpolated = generate_fif(segment, s, density)
    return _hurst(interpolated.y)


def closest_hurst_search(segment: TimeSeries, config: StrategyConfig, seed=None) -> HurstSearch:
    """Draw `config.iterations` constant scaling factors and keep the closest Hurst match.

    A fresh s is drawn every iteration.
    """
    segment.require_length(3, SeriesTooShort)
    rng = np.random.default_rng(config.seed if seed is None else seed)
    target = initial_hurst(segment, config.n_interpolation)
    low, high = config.s_range

    candidates = []
    best_index, best_result = None, None
    for k in range(config.iterations):
        s = float(clamp_scaling(rng.uniform(low, high), warn=False))
        interpolated = generate_fif(segment, s, config.n_interpolation)
        h = _candidate_hurst(segment, s, interpolated)
        candidates.append(HurstCandidate(s=s, hurst=h, distance=abs(h - target)))
        if best_index is None or candidates[-1].distance < candidates[best_index].distance:
            best_index, best_result = k, interpolated

    return HurstSearch(result=best_result, initial_hurst=target, candidates=candidates, best_index=best_index)


def chs(segment: TimeSeries, config: StrategyConfig, seed=None) -> InterpolatedSeries:
    return closest_hurst_search(segment, config, seed).result


# CVS

@dataclass(frozen=True)
class ValuesSearch:
    result: InterpolatedSeries
    study: Study
    s: float
    objective: float


def closest_values_search(segment: TimeSeries, config: StrategyConfig, seed=None, storage=None,
                          name="cvs") -> ValuesSearch:
    """Minimize the RMSE between the fractal and the linear interpolant over a constant s.

    Trials tied exactly with the best objective go to the smallest |s|. So do trials whose
    objective is zero to within 1e-12 of the data scale, which happens when the segment is
    collinear and every s reproduces the line.
    """
    segment.require_length(3, SeriesTooShort)
    study = Study(direction="minimize", seed=config.seed if seed is None else seed, storage=storage, name=name)

    def objective(trial):
        s = float(clamp_scaling(trial.suggest_float("s", -1.0, 1.0), warn=False))
        return _linear_rmse(segment, generate_fif(segment, s, config.n_interpolation))

    best = study.optimize(objective, config.trials)
    tolerance = TIE_TOLERANCE * max(1.0, float(np.max(np.abs(segment.y))))
    if best.objective <= tolerance:
        tied = [t for t in study.trials if t.objective <= tolerance]
    else:
        tied = [t for t in study.trials if t.objective == best.objective]
    chosen = min(tied, key=lambda t: (abs(t.params["s"]), t.index))

    s = float(clamp_scaling(chosen.params["s"], warn=False))
    result = generate_fif(segment, s, config.n_interpolation)
    return ValuesSearch(result=result, study=study, s=s, objective=chosen.objective)


def cvs(segment: TimeSeries, config: StrategyConfig, seed=None) -> InterpolatedSeries:
    return closest_values_search(segment, config, seed).result


# FS

def fs_scaling(segment: TimeSeries) -> ScalingVector:
    """s_i = dy_i / sqrt((y_N - y_0)^2 + dy_i^2), with 0/0 read as 0.

    Intervals where this reaches |s_i| = 1 (a segment with equal end values) are clamped
    with a warning.
    """
    segment.require_length(3, SeriesTooShort)
    y = segment.y
    increments = np.diff(y)
    denominators = np.sqrt((y[-1] - y[0]) ** 2 + increments ** 2)
    if np.all(denominators == 0):
        raise AllPointsEqual("Every interval of the segment is flat; the scaling formula is 0/0 throughout")
    ratios = np.divide(increments, denominators, out=np.zeros_like(increments), where=denominators != 0)
    return ScalingVector(values=clamp_scaling(ratios), constant=False)


def _fs_scaling_or_zero(segment):
    try:
        return fs_scaling(segment).values
    except AllPointsEqual:
        logger.warning("Flat segment at x=%s..%s; using zero scaling", segment.x[0], segment.x[-1])
        return np.zeros(len(segment) - 1)


def fs(segment: TimeSeries, config: StrategyConfig, seed=None) -> InterpolatedSeries:
    return generate_fif(segment, fs_scaling(segment).values, config.n_interpolation)


def sequence_size_rmse(series: TimeSeries, sequence_size, n_interpolation=DEFAULT_N_INTERPOLATION):
    """Sum over the non-strict segments of the RMSE between FS and linear interpolation."""
    total = 0.0
    for segment in split(series, sequence_size, strict=False):
        points = segment.points
        total += _linear_rmse(points, generate_fif(points, _fs_scaling_or_zero(points), n_interpolation))
    return total


def optimize_sequence_size(series: TimeSeries, n_interpolation=DEFAULT_N_INTERPOLATION, trials=50, seed=0,
                           storage=None, name="sequence-size"):
    """Sequence size in [4, len - 3] minimizing the summed FS-vs-linear RMSE over segments."""
    series.require_length(8)
    cache = {}

    def total_rmse(size):
        if size not in cache:
            cache[size] = sequence_size_rmse(series, size, n_interpolation)
        return cache[size]

    study = Study(direction="minimize", seed=seed, storage=storage, name=name)
    best = study.optimize(lambda trial: total_rmse(trial.suggest("sequence_size", IntRange(4, len(series) - 3))),
                          trials)
    logger.info("Best sequence size %d (total RMSE %.6g, %d sizes evaluated)",
                best.params["sequence_size"], best.objective, len(cache))
    return best.params["sequence_size"]


# Driver

def resolve_sequence_size(series: TimeSeries, config: StrategyConfig):
    if config.sequence_size is not None:
        return config.sequence_size
    if config.kind == StrategyKind.FS:
        if len(series) >= 8:
            return optimize_sequence_size(series, config.n_interpolation, config.sequence_trials, config.seed)
        logger.info("Series of %d points is too short to optimize the sequence size", len(series))
    return DEFAULT_SEQUENCE_SIZE


def interpolate_segment(segment: TimeSeries, config: StrategyConfig, seed) -> InterpolatedSeries:
    if config.kind == StrategyKind.CHS:
        return chs(segment, config, seed)
    if config.kind == StrategyKind.CVS:
        return cvs(segment, config, seed)
    if config.kind == StrategyKind.FS:
        return generate_fif(segment, _fs_scaling_or_zero(segment), config.n_interpolation)
    return generate_linear(segment, config.n_interpolation)


def augment(series: TimeSeries, config: StrategyConfig, workers=1) -> TimeSeries:
    """Split, interpolate every segment with the configured strategy, and reunite.

    Segment k uses seed derive_seed(config.seed, k), so the output does not depend on
    `workers`.
    """
    sequence_size = resolve_sequence_size(series, config)
    segments = split(series, sequence_size, config.strict)
    logger.info("Augmenting %d points in %d segments of size %d with %s",
                len(series), len(segments), sequence_size, config.kind.value)

    def run(item):
        index, segment = item
        return interpolate_segment(segment.points, config, derive_seed(config.seed, index))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            interpolated = list(pool.map(run, enumerate(segments)))
    else:
        interpolated = [run(item) for item in enumerate(segments)]
    return reunite(interpolated)


# Densification

@dataclass(frozen=True)
class DensifyResult:
    kind: StrategyKind
    factor: int
    mae: float
    truth: TimeSeries
    predicted: TimeSeries
    sequence_size: Optional[int] = None

    def to_dict(self):
        return {"strategy": self.kind.value, "factor": self.factor, "mae": self.mae,
                "points": len(self.truth), "sequence_size": self.sequence_size}


def simulate_densify(series: TimeSeries, factor, config: StrategyConfig, workers=1) -> DensifyResult:
    """Keep every `factor`-th point, interpolate back with factor - 1 points per gap, and
    report the MAE against the dropped points, aligned by position."""
    if factor < 1:
        raise FactorMismatch(f"factor must be >= 1, got {factor}")
    m = (len(series) - 1) // factor
    truth = series.slice(0, m * factor)
    if factor == 1:
        return DensifyResult(kind=config.kind, factor=1, mae=0.0, truth=truth, predicted=truth)
    if m + 1 < 4:
        raise FactorMismatch(f"Downsampling {len(series)} points by {factor} leaves only {m + 1}")
    return densify_against(TimeSeries(truth.x[::factor], truth.y[::factor]), truth, factor, config, workers)


def densify_against(coarse: TimeSeries, truth: TimeSeries, factor, config: StrategyConfig, workers=1) -> DensifyResult:
    """Interpolate `coarse` with factor - 1 points per gap and compare with `truth`, of which
    `coarse` must be every `factor`-th point. Extra trailing truth points are ignored."""
    if factor < 2:
        raise FactorMismatch(f"factor must be >= 2 to densify, got {factor}")
    needed = (len(coarse) - 1) * factor + 1
    if len(truth) < needed:
        raise FactorMismatch(f"{len(coarse)} coarse points at factor {factor} need {needed} truth points, "
                             f"got {len(truth)}")
    truth = truth.slice(0, needed - 1)
    if not np.allclose(coarse.y, truth.y[::factor], rtol=0, atol=1e-9):
        raise FactorMismatch(f"The coarse series is not the truth downsampled by {factor}")

    config = replace(config, n_interpolation=factor - 1)
    config = replace(config, sequence_size=resolve_sequence_size(coarse, config))
    predicted = augment(coarse, config, workers=workers)
    mae = analysis.metrics(predicted.y, truth.y).mae
    return DensifyResult(kind=config.kind, factor=factor, mae=mae, truth=truth, predicted=predicted,
                         sequence_size=config.sequence_size)


def compare_densify(series: TimeSeries, factor, config: StrategyConfig, kinds=None, workers=1):
    """simulate_densify for several strategies on the same input; defaults to all four."""
    kinds = [StrategyKind.from_string(k) for k in (kinds or list(StrategyKind))]
    return {kind: simulate_densify(series, factor, replace(config, kind=kind), workers=workers) for kind in kinds}
