"""Hyperparameter search for the recurrent predictor, and the end-to-end forecast run."""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import List, Optional

import numpy as np

from ._private.seeds import derive_seed
from .analysis import Metrics
from .errors import WindowTooLarge
from .predictor import PredictorConfig, evaluate, fit_ar_baseline, train_predictor
from .preprocessing import (
    DEFAULT_TRAIN_RATIO,
    NormParams,
    TransformMethod,
    TransformRecord,
    apply_transform,
    chronological_split,
    denormalize,
    invert_transform,
    make_windows,
    normalize,
    select_transform,
)
from .samplers import FloatRange, IntRange
from .series import TimeSeries
from .strategies import StrategyConfig, augment
from .study import Study

logger = logging.getLogger(__name__)

RAW_WINDOW_LIMIT = 15
INTERPOLATED_WINDOW_LIMIT = 100
DEFAULT_WINDOW = 5
RAW_EPOCHS = 150
INTERPOLATED_EPOCHS = 25
UNITS_RANGE = IntRange(2, 64)
LEARNING_RATE_RANGE = FloatRange(1e-3, 1e-1, log=True)
TUNING_STUDY = "tuning"


def window_ceiling(n, interpolated):
    """Largest window searched: min(x, floor(0.3 n) - 1), x = 100 interpolated, 15 raw."""
    limit = INTERPOLATED_WINDOW_LIMIT if interpolated else RAW_WINDOW_LIMIT
    return min(limit, int(np.floor(0.3 * n + 1e-9)) - 1)


def default_epochs(interpolated):
    return INTERPOLATED_EPOCHS if interpolated else RAW_EPOCHS


def supervised_split(values, window, ratio=DEFAULT_TRAIN_RATIO):
    """Windows whose targets fall in the chronological train part, and those whose targets
    fall in the test part. Test windows may reach back into the training values."""
    values = np.asarray(values, dtype=float)
    train, test = chronological_split(values, ratio)
    if window >= len(train):
        raise WindowTooLarge(f"Window of {window} needs more than {len(train)} training values")
    return make_windows(train, window), make_windows(np.concatenate([train[-window:], test]), window)


def tune_hyperparameters(values, interpolated, trials=50, repeats=5, seed=0, epochs=None, batch_size=1,
                         workers=1, cancel=None, storage=None, ratio=DEFAULT_TRAIN_RATIO, name=TUNING_STUDY):
    """Search units, window and learning rate minimizing the mean test RMSE over `repeats` fits.

    Repeat r of trial k trains with seed derive_seed(seed, k, r); the fits may run on
    `workers` threads without changing the result.
    """
    values = np.asarray(values, dtype=float)
    ceiling = window_ceiling(len(values), interpolated)
    if ceiling < 1:
        raise WindowTooLarge(f"{len(values)} points leave no room for a window below 30% of the data")
    epochs = epochs or default_epochs(interpolated)
    window_range = IntRange(1, ceiling) if ceiling > 1 else None

    def objective(trial):
        units = trial.suggest("units", UNITS_RANGE)
        window = trial.suggest("input_data_points", window_range) if window_range else 1
        learning_rate = trial.suggest("learning_rate", LEARNING_RATE_RANGE)
        train_set, test_set = supervised_split(values, window, ratio)

        def fit(repeat):
            config = PredictorConfig(units=units, input_data_points=window, learning_rate=learning_rate,
                                     epochs=epochs, seed=derive_seed(seed, trial.index, repeat),
                                     batch_size=batch_size)
            return evaluate(train_predictor(train_set, config), test_set).rmse

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                scores = list(pool.map(fit, range(repeats)))
        else:
            scores = [fit(r) for r in range(repeats)]
        return float(np.mean(scores))

    study = Study(direction="minimize", seed=seed, storage=storage, name=name)
    best = study.optimize(objective, trials, cancel=cancel)
    logger.info("Best of %d tuning trials: %s (test RMSE %.6g)", len(study.trials), best.params, best.objective)
    return PredictorConfig(
        units=best.params["units"],
        input_data_points=best.params.get("input_data_points", 1),
        learning_rate=best.params["learning_rate"],
        epochs=epochs,
        seed=seed,
        batch_size=batch_size,
    )


@dataclass(frozen=True)
class ForecastReport:
    strategy: Optional[str]
    n_points: int
    transform: TransformRecord
    norm: NormParams
    config: PredictorConfig
    train: Metrics
    test: Metrics
    baseline_train: Metrics
    baseline_test: Metrics
    predictions: Optional[List[float]] = None

    def to_dict(self):
        return {
            "strategy": self.strategy,
            "n_points": self.n_points,
            "transform": self.transform.to_dict(),
            "normalization": self.norm.to_dict(),
            "config": self.config.to_dict(),
            "lstm": {"train": self.train.to_dict(), "test": self.test.to_dict()},
            "ar_baseline": {"train": self.baseline_train.to_dict(), "test": self.baseline_test.to_dict()},
            "predictions": self.predictions,
        }


def run_forecast(series: TimeSeries, strategy: StrategyConfig = None, config: PredictorConfig = None, tune=False,
                 trials=50, repeats=5, seed=0, epochs=None, batch_size=1, workers=1, cancel=None, storage=None,
                 ratio=DEFAULT_TRAIN_RATIO, denormalize_output=False) -> ForecastReport:
    """Augment (optionally), transform, normalize to [0, 1], split, window, train and evaluate.

    Metrics are in normalized space. With `denormalize_output` the test predictions are
    also mapped back to the original scale.
    """
    interpolated = strategy is not None
    if interpolated:
        series = augment(series, strategy, workers=workers)
    values = series.y

    method = select_transform(values) if len(values) >= 20 else TransformMethod.NONE
    transformed, record = apply_transform(values, method)
    normalized, norm = normalize(transformed, 0.0, 1.0)

    if tune:
        config = tune_hyperparameters(normalized, interpolated, trials=trials, repeats=repeats, seed=seed,
                                      epochs=epochs, batch_size=batch_size, workers=workers, cancel=cancel,
                                      storage=storage, ratio=ratio)
    elif config is None:
        window = max(1, min(DEFAULT_WINDOW, window_ceiling(len(values), interpolated)))
        config = PredictorConfig(input_data_points=window, epochs=epochs or default_epochs(interpolated),
                                 seed=seed, batch_size=batch_size)
    elif epochs is not None:
        config = replace(config, epochs=epochs)
    config.check_dataset_length(len(values))

    train_set, test_set = supervised_split(normalized, config.input_data_points, ratio)
    predictor = train_predictor(train_set, config)
    baseline = fit_ar_baseline(train_set)

    predictions = None
    if denormalize_output:
        offset = len(values) - len(test_set)
        scaled = predictor.predict(test_set.inputs)
        predictions = invert_transform(denormalize(scaled, norm), record, offset=offset).tolist()

    return ForecastReport(
        strategy=strategy.kind.value if interpolated else None,
        n_points=len(values),
        transform=record,
        norm=norm,
        config=config,
        train=evaluate(predictor, train_set),
        test=evaluate(predictor, test_set),
        baseline_train=evaluate(baseline, train_set),
        baseline_test=evaluate(baseline, test_set),
        predictions=predictions,
    )


def relative_improvement(raw: Metrics, augmented: Metrics):
    """Fractional RMSE reduction of `augmented` over `raw`."""
    return (raw.rmse - augmented.rmse) / raw.rmse if raw.rmse > 0 else 0.0

