"""Optimization studies: a direction, a sampler and the history of trials run so far.

    study = Study(direction="minimize", seed=0)
    best = run_study(study, lambda trial: (trial.suggest_float("x", -1, 1) - 0.3) ** 2, n_trials=30)
"""
import json
import logging
import math
from enum import Enum

import numpy as np

from . import perflog
from ._private.seeds import derive_seed
from .cancellation import Cancel
from .errors import DuplicateParameterName, ObjectiveFailure
from .samplers import FloatRange, IntRange, TpeSampler, sample_uniform
from .storage import StudyStorage

logger = logging.getLogger(__name__)

DEFAULT_N_STARTUP = 5


class Direction(Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"

    @staticmethod
    def from_string(s):
        if isinstance(s, Direction):
            return s
        try:
            return Direction(s.lower())
        except ValueError:
            raise ValueError(f"Unknown direction {s!r}, expected 'minimize' or 'maximize'") from None


class Trial:
    """A single execution of the objective.

    Parameters are drawn through `suggest`; the study fills in `objective` once the
    objective returns.
    """

    def __init__(self, study, index, params=None, objective=None):
        self.study = study
        self.index = index
        self.params = dict(params or {})
        self.objective = objective
        self._rng = np.random.default_rng(derive_seed(study.seed, index))

    @property
    def complete(self):
        return self.objective is not None

    def suggest(self, name, space):
        if name in self.params:
            raise DuplicateParameterName(f"Parameter {name!r} was already suggested in trial {self.index}")
        value = self.study._sample(self, name, space)
        self.params[name] = value
        return value

    def suggest_float(self, name, low, high, log=False):
        return self.suggest(name, FloatRange(low, high, log=log))

    def suggest_int(self, name, low, high):
        return self.suggest(name, IntRange(low, high))

    def to_dict(self):
        return {"index": self.index, "params": dict(self.params), "objective": self.objective}

    def __repr__(self):
        return f"Trial(index={self.index}, params={self.params}, objective={self.objective})"


class Study:
    """A sequence of trials in one direction, deterministic for a given seed.

    The first `n_startup` trials sample uniformly; later ones ask the sampler (TPE by
    default). With a storage, the study is kept under `name` there; an existing study
    of that name is resumed.
    """

    def __init__(self, direction="minimize", seed=0, n_startup=DEFAULT_N_STARTUP, sampler=None,
                 storage: StudyStorage = None, name="study"):
        if n_startup < 0:
            raise ValueError(f"n_startup must be >= 0, got {n_startup}")
        self.direction = Direction.from_string(direction)
        self.seed = int(seed)
        self.n_startup = n_startup
        self.sampler = sampler or TpeSampler()
        self.storage = storage
        self.name = name
        self.trials = []

        if storage is not None:
            record = storage.get_study(name)
            if record is None:
                storage.create_study(name, self.direction.value, self.seed, self.n_startup)
            else:
                self._resume(record)

    def _resume(self, record):
        if record["direction"] != self.direction.value or record["seed"] != self.seed:
            raise ValueError(
                f"Stored study {self.name!r} has direction {record['direction']} and seed {record['seed']}, "
                f"not {self.direction.value} and {self.seed}")
        self.trials = [Trial(self, t["index"], t["params"], t["objective"]) for t in record["trials"]]
        logger.info("Resumed study %r with %d trials", self.name, len(self.trials))

    @property
    def best_trial(self):
        """The best completed trial; the earliest wins ties."""
        completed = [t for t in self.trials if t.complete]
        if not completed:
            raise ValueError(f"Study {self.name!r} has no completed trials")
        pick = min if self.direction == Direction.MINIMIZE else max
        return pick(completed, key=lambda t: t.objective)

    @property
    def best_value(self):
        return self.best_trial.objective

    def history(self, name):
        """(value, objective) of every completed trial that suggested `name`."""
        return [(t.params[name], t.objective) for t in self.trials if t.complete and name in t.params]

    def _sample(self, trial, name, space):
        if trial.index < self.n_startup:
            return sample_uniform(space, trial._rng)
        sign = 1.0 if self.direction == Direction.MINIMIZE else -1.0
        history = [(value, sign * objective) for value, objective in self.history(name)]
        return self.sampler.sample(history, space, trial._rng)

    def optimize(self, objective, n_trials, cancel: Cancel = None):
        """Run `n_trials` trials one after another and return the best.

        A cancelled token stops the loop before the next trial; the first trial always runs.
        """
        if n_trials < 1:
            raise ValueError(f"n_trials must be >= 1, got {n_trials}")
        cancel = cancel or Cancel.never()
        for k in range(n_trials):
            if k > 0 and cancel.is_cancelled():
                logger.info("Study %r cancelled after %d of %d trials", self.name, k, n_trials)
                break
            self._run_trial(objective)
        return self.best_trial

    @perflog.timed_as("study_trial")
    def _run_trial(self, objective):
        trial = Trial(self, len(self.trials))
        try:
            value = objective(trial)
        except Exception as e:
            raise ObjectiveFailure(trial.index, e) from e
        try:
            value = float(value)
        except (TypeError, ValueError) as e:
            raise ObjectiveFailure(trial.index, e) from e
        if not math.isfinite(value):
            raise ObjectiveFailure(trial.index, f"objective returned {value}")

        trial.objective = value
        self.trials.append(trial)
        if self.storage is not None:
            self.storage.append_trial(self.name, trial.to_dict())
        perflog.log_counter("study_trials")
        logger.debug("Trial %d of %r: %s -> %s", trial.index, self.name, trial.params, value)
        return trial

    def to_dict(self):
        return {
            "name": self.name,
            "direction": self.direction.value,
            "seed": self.seed,
            "n_startup": self.n_startup,
            "trials": [t.to_dict() for t in self.trials],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def run_study(study, objective, n_trials, cancel: Cancel = None):
    """Run `n_trials` sequential trials of `objective` on `study`; returns the best trial."""
    return study.optimize(objective, n_trials, cancel=cancel)
