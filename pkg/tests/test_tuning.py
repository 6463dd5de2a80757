import json
import unittest

import numpy as np

from fifaug import datasets, tuning
from fifaug.cancellation import Cancel
from fifaug.errors import WindowTooLarge
from fifaug.predictor import PredictorConfig
from fifaug.preprocessing import normalize
from fifaug.strategies import StrategyConfig


class Helpers:
    def assertImproves(self, improvements):
        """At least 4 of 5 positive, with a median of at least 30%."""
        self.assertGreaterEqual(sum(v > 0 for v in improvements), 4)
        self.assertGreaterEqual(np.median(improvements), 0.30)


class TestWindows(unittest.TestCase):
    def test_window_ceiling(self):
        self.assertEqual(tuning.window_ceiling(631, True), 100)
        self.assertEqual(tuning.window_ceiling(36, False), 9)
        self.assertEqual(tuning.window_ceiling(168, False), 15)

    def test_test_windows_reach_into_the_training_tail(self):
        values = np.arange(20.0)
        train, test = tuning.supervised_split(values, 3)
        self.assertEqual(len(train), 14 - 3)
        self.assertEqual(len(test), 6)
        np.testing.assert_array_equal(test.inputs[0], [11.0, 12.0, 13.0])
        self.assertEqual(test.targets[0], 14.0)

    def test_window_wider_than_training(self):
        with self.assertRaises(WindowTooLarge):
            tuning.supervised_split(np.arange(10.0), 7)


class TestTuneHyperparameters(unittest.TestCase):
    def setUp(self):
        self.values, _ = normalize(datasets.generate('diurnal', 60, seed=0).y)

    def tune(self, **kwargs):
        return tuning.tune_hyperparameters(self.values, False, trials=3, repeats=1, epochs=2, seed=1, **kwargs)

    def test_config_in_range(self):
        config = self.tune()
        self.assertTrue(2 <= config.units <= 64)
        self.assertTrue(1 <= config.input_data_points <= tuning.window_ceiling(60, False))
        self.assertTrue(1e-3 <= config.learning_rate <= 1e-1)
        self.assertEqual(config.epochs, 2)

    def test_workers_do_not_change_the_result(self):
        self.assertEqual(tuning.tune_hyperparameters(self.values, False, trials=2, repeats=2, epochs=1, workers=1),
                         tuning.tune_hyperparameters(self.values, False, trials=2, repeats=2, epochs=1, workers=2))

    def test_cancelled_tuning_still_returns_a_config(self):
        config = self.tune(cancel=Cancel.after_timeout(0))
        self.assertIsInstance(config, PredictorConfig)

    def test_too_short_to_tune(self):
        with self.assertRaises(WindowTooLarge):
            tuning.tune_hyperparameters(np.linspace(0, 1, 6), False, trials=1, repeats=1, epochs=1)


class TestRunForecast(unittest.TestCase, Helpers):
    def setUp(self):
        self.series = datasets.generate('diurnal', 80, seed=2)
        self.config = PredictorConfig(units=8, input_data_points=4, epochs=3, seed=1)

    def test_report(self):
        report = tuning.run_forecast(self.series, config=self.config)
        document = json.loads(json.dumps(report.to_dict()))

        self.assertIsNone(document['strategy'])
        self.assertEqual(document['n_points'], 80)
        self.assertEqual(document['config']['units'], 8)
        for model in ('lstm', 'ar_baseline'):
            for part in ('train', 'test'):
                self.assertGreaterEqual(document[model][part]['rmse'], 0.0)

    def test_same_seed_same_metrics(self):
        first = tuning.run_forecast(self.series, config=self.config)
        second = tuning.run_forecast(self.series, config=self.config)
        self.assertEqual(first.test, second.test)

    def test_denormalized_predictions(self):
        report = tuning.run_forecast(self.series, config=self.config, denormalize_output=True)
        self.assertEqual(len(report.predictions), 80 - 56)
        self.assertTrue(np.all(np.abs(np.array(report.predictions) - self.series.y[56:].mean()) < 20))

    def test_augmented_series(self):
        strategy = StrategyConfig(kind='cvs', trials=3, n_interpolation=5)
        report = tuning.run_forecast(self.series, strategy=strategy, config=self.config)
        self.assertEqual(report.strategy, 'cvs')
        self.assertEqual(report.n_points, 80 + 79 * 5)

    def test_window_too_large_for_the_data(self):
        with self.assertRaises(WindowTooLarge):
            tuning.run_forecast(datasets.generate('diurnal', 20), config=PredictorConfig(input_data_points=6))

    def test_augmentation_helps_next_step_prediction(self):
        """Test that interpolated series are easier to predict one step ahead, for the LSTM and
        for the AR baseline."""
        config = PredictorConfig(units=16, input_data_points=5, epochs=10, batch_size=8)
        lstm, ar = [], []
        for seed in range(5):
            series = datasets.generate('diurnal', 168, seed=seed)
            raw = tuning.run_forecast(series, config=PredictorConfig(**{**config.to_dict(), 'seed': seed}))
            augmented = tuning.run_forecast(series, strategy=StrategyConfig(kind='cvs', seed=seed),
                                            config=PredictorConfig(**{**config.to_dict(), 'seed': seed}))
            lstm.append(tuning.relative_improvement(raw.test, augmented.test))
            ar.append(tuning.relative_improvement(raw.baseline_test, augmented.baseline_test))
        self.assertImproves(lstm)
        self.assertImproves(ar)

    def test_tuned_augmentation_helps_next_step_prediction(self):
        """Test that the improvement survives tuning both sides with 10 trials each."""
        lstm, ar = [], []
        for seed in range(5):
            series = datasets.generate('diurnal', 168, seed=seed)
            raw = tuning.run_forecast(series, tune=True, trials=10, repeats=1, seed=seed, epochs=30, batch_size=16)
            augmented = tuning.run_forecast(series, strategy=StrategyConfig(kind='cvs', seed=seed), tune=True,
                                            trials=10, repeats=1, seed=seed, epochs=5, batch_size=32)
            lstm.append(tuning.relative_improvement(raw.test, augmented.test))
            ar.append(tuning.relative_improvement(raw.baseline_test, augmented.baseline_test))
        self.assertImproves(lstm)
        self.assertImproves(ar)


if __name__ == '__main__':
    unittest.main()
