import json
import unittest
from unittest import mock

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from fifaug import samplers
from fifaug.cancellation import Cancel
from fifaug.errors import DuplicateParameterName, InsufficientHistory, InvalidRange, ObjectiveFailure
from fifaug.samplers import FloatRange, IntRange, RandomSampler
from fifaug.storage import LocalStorage
from fifaug.study import Direction, Study, run_study

from .helpers import temp_path, with_clean_file


def quadratic(trial):
    return (trial.suggest_float('x', -1.0, 1.0) - 0.3) ** 2


class Helpers:
    def study_of(self, objective=quadratic, n_trials=30, **kwargs):
        study = Study(**kwargs)
        run_study(study, objective, n_trials)
        return study

    def xs(self, study):
        return [t.params['x'] for t in study.trials]


class TestRanges(unittest.TestCase):
    def test_invalid_ranges(self):
        with self.assertRaises(InvalidRange):
            IntRange(4, 4)
        with self.assertRaises(InvalidRange):
            FloatRange(1.0, 0.0)
        with self.assertRaises(InvalidRange):
            FloatRange(0.0, 1.0, log=True)

    @given(st.integers(min_value=0, max_value=2 ** 31), st.integers(min_value=-50, max_value=50),
           st.integers(min_value=1, max_value=100))
    def test_samples_stay_in_range(self, seed, low, width):
        rng = np.random.default_rng(seed)
        space = IntRange(low, low + width)
        history = [(samplers.sample_uniform(space, rng), float(k)) for k in range(6)]
        for _ in range(5):
            value = samplers.tpe_sample(history, space, rng=rng)
            self.assertTrue(space.contains(value))
            self.assertIsInstance(value, int)

    @given(st.integers(min_value=0, max_value=2 ** 31))
    def test_log_samples_stay_in_range(self, seed):
        rng = np.random.default_rng(seed)
        space = FloatRange(1e-3, 1e-1, log=True)
        history = [(samplers.sample_uniform(space, rng), float(k % 3)) for k in range(8)]
        self.assertTrue(space.contains(samplers.tpe_sample(history, space, rng=rng)))


class TestTpe(unittest.TestCase):
    def test_needs_two_observations(self):
        with self.assertRaises(InsufficientHistory):
            samplers.tpe_sample([(0.1, 1.0)], FloatRange(-1.0, 1.0), rng=np.random.default_rng(0))

    def test_follows_the_good_cluster(self):
        """Test that a clear cluster of good observations attracts the next proposal."""
        good = [(v, 0.0) for v in (0.28, 0.30, 0.32)]
        rest = [(v, 1.0) for v in (-0.85, -0.82, -0.80, -0.78, -0.75, -0.9, -0.7, -0.88, -0.72)]
        for seed in range(10):
            value = samplers.tpe_sample(good + rest, FloatRange(-1.0, 1.0), rng=np.random.default_rng(seed))
            self.assertTrue(0.1 <= value <= 0.5, value)

    def test_identical_objectives(self):
        history = [(v, 1.0) for v in np.linspace(-0.9, 0.9, 10)]
        value = samplers.tpe_sample(history, FloatRange(-1.0, 1.0), rng=np.random.default_rng(0))
        self.assertTrue(-1.0 <= value <= 1.0)

    def test_bad_gamma(self):
        with self.assertRaises(ValueError):
            samplers.TpeSampler(gamma=1.5)


class TestStudy(unittest.TestCase, Helpers):
    def test_first_trial_is_uniform_and_reproducible(self):
        first = self.study_of(n_trials=1, seed=7)
        second = self.study_of(n_trials=1, seed=7)
        self.assertEqual(len(first.trials), 1)
        self.assertTrue(-1.0 <= first.trials[0].params['x'] <= 1.0)
        self.assertEqual(self.xs(first), self.xs(second))

    def test_same_seed_same_history(self):
        self.assertEqual(self.xs(self.study_of(seed=3)), self.xs(self.study_of(seed=3)))
        self.assertNotEqual(self.xs(self.study_of(seed=3)), self.xs(self.study_of(seed=4)))

    def test_minimize_quadratic(self):
        """Test that 30 trials get close to the minimum for almost every seed."""
        close = sum(self.study_of(seed=seed).best_value <= 0.0025 for seed in range(20))
        self.assertGreaterEqual(close, 18)

    def test_later_trials_concentrate(self):
        inside = total = 0
        for seed in range(5):
            late = self.xs(self.study_of(seed=seed))[15:]
            inside += sum(0.1 <= x <= 0.5 for x in late)
            total += len(late)
        self.assertGreaterEqual(inside / total, 0.6)

    def test_maximize(self):
        study = self.study_of(lambda t: -abs(t.suggest_float('x', -1.0, 1.0)), n_trials=15, direction='maximize')
        self.assertEqual(study.direction, Direction.MAXIMIZE)
        self.assertLessEqual(abs(study.best_trial.params['x']), 0.2)

    def test_tpe_beats_random_search(self):
        tpe = [self.study_of(seed=seed).best_value for seed in range(20)]
        uniform = [self.study_of(seed=seed, sampler=RandomSampler()).best_value for seed in range(20)]
        self.assertLessEqual(np.median(tpe), np.median(uniform))

    def test_earliest_trial_wins_ties(self):
        study = self.study_of(lambda t: t.suggest_int('k', 0, 10) * 0.0, n_trials=5)
        self.assertEqual(study.best_trial.index, 0)

    def test_duplicate_parameter(self):
        def objective(trial):
            trial.suggest_float('x', 0.0, 1.0)
            return trial.suggest_float('x', 0.0, 1.0)

        with self.assertRaises(ObjectiveFailure) as cm:
            self.study_of(objective, n_trials=1)
        self.assertIsInstance(cm.exception.__cause__, DuplicateParameterName)

    def test_objective_failure(self):
        def objective(trial):
            if trial.index == 2:
                raise RuntimeError('boom')
            return trial.suggest_float('x', 0.0, 1.0)

        study = Study(seed=0)
        with self.assertRaises(ObjectiveFailure) as cm:
            run_study(study, objective, 5)
        self.assertEqual(cm.exception.trial_index, 2)
        self.assertEqual(len(study.trials), 2)

    def test_non_finite_objective(self):
        with self.assertRaises(ObjectiveFailure):
            self.study_of(lambda t: float('nan'), n_trials=1)

    def test_cancelled_study_runs_one_trial(self):
        study = Study(seed=0)
        run_study(study, quadratic, 10, cancel=Cancel.after_timeout(0))
        self.assertEqual(len(study.trials), 1)

    def test_cancelled_mid_study(self):
        """Test that a token cancelled during trial 3 lets it finish and starts no further trial."""
        study = Study(seed=0)
        cancel = mock.Mock(spec=Cancel)
        cancel.is_cancelled.side_effect = lambda: len(study.trials) >= 4
        run_study(study, quadratic, 10, cancel=cancel)
        self.assertEqual(len(study.trials), 4)

    def test_to_json(self):
        document = json.loads(self.study_of(n_trials=3, seed=1, name='q').to_json())
        self.assertEqual(document['name'], 'q')
        self.assertEqual(document['direction'], 'minimize')
        self.assertEqual([t['index'] for t in document['trials']], [0, 1, 2])


class TestStorage(unittest.TestCase, Helpers):
    def test_resumed_study_matches_an_uninterrupted_one(self):
        filename = temp_path('fifaug-test-study.json')
        with with_clean_file(filename):
            first = Study(seed=11, storage=LocalStorage(filename), name='q')
            run_study(first, quadratic, 6)

            resumed = Study(seed=11, storage=LocalStorage(filename), name='q')
            self.assertEqual(len(resumed.trials), 6)
            run_study(resumed, quadratic, 6)

            self.assertEqual(self.xs(resumed), self.xs(self.study_of(n_trials=12, seed=11)))

    def test_resume_with_other_seed(self):
        storage = LocalStorage()
        run_study(Study(seed=1, storage=storage, name='q'), quadratic, 2)
        with self.assertRaises(ValueError):
            Study(seed=2, storage=storage, name='q')

    def test_storage_records(self):
        storage = LocalStorage()
        run_study(Study(seed=1, storage=storage, name='q'), quadratic, 3)

        self.assertEqual(storage.study_names(), ['q'])
        self.assertEqual(len(storage.get_study('q')['trials']), 3)
        with self.assertRaises(ValueError):
            storage.create_study('q', 'minimize', 1, 5)
        with self.assertRaises(ValueError):
            storage.append_trial('q', {'index': 7, 'params': {}, 'objective': 0.0})

        storage.delete_study('q')
        self.assertIsNone(storage.get_study('q'))

    def test_corrupt_file_is_replaced(self):
        filename = temp_path('fifaug-test-corrupt.json')
        with with_clean_file(filename):
            with open(filename, 'w') as f:
                f.write('{not json')
            with self.assertLogs('fifaug.storage.local_storage', level='WARNING'):
                storage = LocalStorage(filename)
            run_study(Study(seed=0, storage=storage, name='q'), quadratic, 1)

            with open(filename) as f:
                self.assertEqual(list(json.load(f)), ['q'])

    @settings(deadline=None, max_examples=20)
    @given(st.integers(min_value=0, max_value=2 ** 31))
    def test_stored_trials_are_plain_json(self, seed):
        storage = LocalStorage()
        study = Study(seed=seed, storage=storage, name='q')
        run_study(study, lambda t: t.suggest_int('k', 1, 9) / 10, 7)
        json.dumps(storage.get_study('q'))
        self.assertTrue(all(isinstance(t['params']['k'], int) for t in storage.get_study('q')['trials']))


if __name__ == '__main__':
    unittest.main()
