"""One-step-ahead forecasters over sliding windows.

`LstmPredictor` is a single gated recurrent layer (forget, input and output gates with a
tanh cell) reading the window one value per time step, followed by a width-1 affine
head. It is trained with Adam on the mean squared error with backpropagation through
time. `ArPredictor` is the closed-form ridge autoregression used as a baseline.
"""
import json
import logging
import math
from abc import ABCMeta, abstractmethod
from dataclasses import asdict, dataclass

import numpy as np

from . import perflog
from .analysis import Metrics, metrics
from .errors import DatasetError, EmptyInput, NonFiniteLoss, SingularSystem, WindowTooLarge, WindowWidthMismatch
from .preprocessing import SupervisedSet

logger = logging.getLogger(__name__)

MIN_UNITS = 2
MAX_UNITS = 64
MAX_WINDOW_FRACTION = 0.3
GRADIENT_CLIP_NORM = 1.0
ADAM_BETAS = (0.9, 0.999)
ADAM_EPSILON = 1e-7
LOSS_RISE_TOLERANCE = 0.05


@dataclass
class PredictorConfig:
    units: int = 32
    input_data_points: int = 5
    learning_rate: float = 0.01
    epochs: int = 25
    seed: int = 0
    batch_size: int = 1

    def __post_init__(self):
        if not MIN_UNITS <= self.units <= MAX_UNITS:
            raise ValueError(f"units must be in [{MIN_UNITS}, {MAX_UNITS}], got {self.units}")
        if self.input_data_points < 1:
            raise ValueError(f"input_data_points must be >= 1, got {self.input_data_points}")
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError(f"epochs and batch_size must be >= 1, got {self.epochs} and {self.batch_size}")

    def check_dataset_length(self, n):
        """The window must stay below 30% of the dataset."""
        if self.input_data_points >= MAX_WINDOW_FRACTION * n:
            raise WindowTooLarge(
                f"input_data_points={self.input_data_points} is not below 30% of {n} points")

    def to_dict(self):
        return asdict(self)

    @staticmethod
    def from_dict(d):
        return PredictorConfig(**d)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @staticmethod
    def from_json(s):
        return PredictorConfig.from_dict(json.loads(s))


class Predictor(metaclass=ABCMeta):
    """Maps windows of `window_size` values to the next value."""

    @property
    @abstractmethod
    def window_size(self):
        ...

    @abstractmethod
    def _predict(self, windows):
        ...

    @abstractmethod
    def to_dict(self):
        ...

    def predict(self, windows):
        windows = np.atleast_2d(np.asarray(windows, dtype=float))
        if windows.shape[1] != self.window_size:
            raise WindowWidthMismatch(f"Predictor reads windows of {self.window_size}, got {windows.shape[1]}")
        return self._predict(windows)


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _initial_weights(units, rng):
    input_limit = math.sqrt(6.0 / (1 + 4 * units))
    q, r = np.linalg.qr(rng.standard_normal((4 * units, units)))
    q = q * np.sign(np.diag(r))
    bias = np.zeros(4 * units)
    bias[:units] = 1.0
    head_limit = math.sqrt(6.0 / (units + 1))
    return {
        # rows: [x_t, h_{t-1}]; columns: forget, input, candidate, output gates
        "kernel": np.vstack([rng.uniform(-input_limit, input_limit, (1, 4 * units)), q.T]),
        "bias": bias,
        "head": rng.uniform(-head_limit, head_limit, units),
        "head_bias": np.zeros(1),
    }


class LstmPredictor(Predictor):
    def __init__(self, config: PredictorConfig, weights, loss_history=None):
        self.config = config
        self.weights = weights
        self.loss_history = list(loss_history or [])

    @property
    def window_size(self):
        return self.config.input_data_points

    @property
    def units(self):
        return self.config.units

    def _forward(self, windows):
        """Outputs plus the per-step activations backpropagation needs."""
        kernel, bias = self.weights["kernel"], self.weights["bias"]
        batch, steps = windows.shape
        u = self.units
        h = np.zeros((batch, u))
        c = np.zeros((batch, u))
        cache = []
        for t in range(steps):
            z = np.concatenate([windows[:, t:t + 1], h], axis=1)
            a = z @ kernel + bias
            f = _sigmoid(a[:, :u])
            i = _sigmoid(a[:, u:2 * u])
            g = np.tanh(a[:, 2 * u:3 * u])
            o = _sigmoid(a[:, 3 * u:])
            c_prev = c
            c = f * c_prev + i * g
            tc = np.tanh(c)
            h = o * tc
            cache.append((z, f, i, g, o, c_prev, tc))
        out = h @ self.weights["head"] + self.weights["head_bias"][0]
        return out, h, cache

    def _predict(self, windows):
        out, _, _ = self._forward(windows)
        return out

    def _gradients(self, windows, targets):
        out, h_last, cache = self._forward(windows)
        errors = out - targets
        kernel = self.weights["kernel"]
        u = self.units

        d_out = 2.0 * errors / len(targets)
        grads = {
            "kernel": np.zeros_like(kernel),
            "bias": np.zeros_like(self.weights["bias"]),
            "head": h_last.T @ d_out,
            "head_bias": np.array([d_out.sum()]),
        }
        dh = np.outer(d_out, self.weights["head"])
        dc = np.zeros_like(dh)
        for z, f, i, g, o, c_prev, tc in reversed(cache):
            d_o = dh * tc
            dc = dc + dh * o * (1.0 - tc ** 2)
            da = np.concatenate([
                dc * c_prev * f * (1.0 - f),
                dc * g * i * (1.0 - i),
                dc * i * (1.0 - g ** 2),
                d_o * o * (1.0 - o),
            ], axis=1)
            grads["kernel"] += z.T @ da
            grads["bias"] += da.sum(axis=0)
            dh = (da @ kernel.T)[:, 1:]
            dc = dc * f
        return grads, errors ** 2

    def to_dict(self):
        return {
            "kind": "lstm",
            "config": self.config.to_dict(),
            "weights": {name: w.tolist() for name, w in self.weights.items()},
            "loss_history": self.loss_history,
        }


class _Adam:
    def __init__(self, weights, learning_rate):
        self.learning_rate = learning_rate
        self.m = {name: np.zeros_like(w) for name, w in weights.items()}
        self.v = {name: np.zeros_like(w) for name, w in weights.items()}
        self.t = 0

    def step(self, weights, grads):
        beta1, beta2 = ADAM_BETAS
        self.t += 1
        correction = math.sqrt(1 - beta2 ** self.t) / (1 - beta1 ** self.t)
        for name, grad in grads.items():
            self.m[name] = beta1 * self.m[name] + (1 - beta1) * grad
            self.v[name] = beta2 * self.v[name] + (1 - beta2) * grad ** 2
            weights[name] -= self.learning_rate * correction * self.m[name] / (np.sqrt(self.v[name]) + ADAM_EPSILON)

    def state(self):
        return self.t, {name: m.copy() for name, m in self.m.items()}, {name: v.copy() for name, v in self.v.items()}

    def restore(self, state):
        self.t, self.m, self.v = state


def _clip(grads, max_norm):
    norm = math.sqrt(sum(float(np.sum(g ** 2)) for g in grads.values()))
    if norm > max_norm:
        return {name: g * (max_norm / norm) for name, g in grads.items()}
    return grads


def _check_training_set(train: SupervisedSet, window_size):
    if len(train) == 0:
        raise EmptyInput("Training set is empty")
    if train.window_size != window_size:
        raise WindowWidthMismatch(f"Config expects windows of {window_size}, training set has {train.window_size}")


@perflog.timed_as("predictor_fit")
def train_predictor(train: SupervisedSet, config: PredictorConfig) -> LstmPredictor:
    """Train for `config.epochs` passes over shuffled windows, `config.batch_size` per step.

    The epoch loss is the mean squared error over the whole training set once the epoch
    is done. An epoch that raises it by more than 5% is undone and the learning rate
    halved, so the recorded history never rises by more than that from one epoch to the
    next. A non-finite loss aborts training with NonFiniteLoss.
    """
    _check_training_set(train, config.input_data_points)
    rng = np.random.default_rng(config.seed)
    predictor = LstmPredictor(config, _initial_weights(config.units, rng))
    optimizer = _Adam(predictor.weights, config.learning_rate)

    n = len(train)
    loss = None
    for epoch in range(config.epochs):
        saved_weights = {name: w.copy() for name, w in predictor.weights.items()}
        saved_state = optimizer.state()
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, config.batch_size):
            batch = order[start:start + config.batch_size]
            grads, losses = predictor._gradients(train.inputs[batch], train.targets[batch])
            total += float(losses.sum())
            if not math.isfinite(total):
                raise NonFiniteLoss(epoch, total)
            optimizer.step(predictor.weights, _clip(grads, GRADIENT_CLIP_NORM))

        epoch_loss = float(np.mean((predictor.predict(train.inputs) - train.targets) ** 2))
        if not math.isfinite(epoch_loss):
            raise NonFiniteLoss(epoch, epoch_loss)
        if loss is not None and epoch_loss > loss * (1 + LOSS_RISE_TOLERANCE):
            predictor.weights = saved_weights
            optimizer.restore(saved_state)
            optimizer.learning_rate /= 2
            logger.debug("Epoch %d/%d: loss %.6g above %.6g, undone; learning rate now %.3g",
                         epoch + 1, config.epochs, epoch_loss, loss, optimizer.learning_rate)
        else:
            loss = epoch_loss
            logger.debug("Epoch %d/%d: loss %.6g", epoch + 1, config.epochs, loss)
        predictor.loss_history.append(loss)

    perflog.log_counter("predictor_epochs", config.epochs)
    return predictor


class ArPredictor(Predictor):
    """y_next = intercept + coefficients . window"""

    def __init__(self, coefficients, intercept, ridge):
        self.coefficients = np.asarray(coefficients, dtype=float)
        self.intercept = float(intercept)
        self.ridge = ridge

    @property
    def window_size(self):
        return len(self.coefficients)

    def _predict(self, windows):
        return windows @ self.coefficients + self.intercept

    def to_dict(self):
        return {
            "kind": "ar",
            "coefficients": self.coefficients.tolist(),
            "intercept": self.intercept,
            "ridge": self.ridge,
        }


def fit_ar_baseline(train: SupervisedSet, ridge=1e-6) -> ArPredictor:
    """Ridge least squares from window to next value; the intercept is not penalized."""
    if len(train) == 0:
        raise EmptyInput("Training set is empty")
    x, y = train.inputs, train.targets
    x_mean, y_mean = x.mean(axis=0), y.mean()
    xc, yc = x - x_mean, y - y_mean
    try:
        coefficients = np.linalg.solve(xc.T @ xc + ridge * np.eye(x.shape[1]), xc.T @ yc)
    except np.linalg.LinAlgError as e:
        raise SingularSystem(f"Autoregression normal equations are singular: {e}") from e
    return ArPredictor(coefficients, y_mean - x_mean @ coefficients, ridge)


def predict(predictor: Predictor, windows):
    return predictor.predict(windows)


def evaluate(predictor: Predictor, windows, targets=None) -> Metrics:
    """Metrics of `predictor` on a SupervisedSet, or on windows and their targets."""
    if isinstance(windows, SupervisedSet):
        windows, targets = windows.inputs, windows.targets
    return metrics(predictor.predict(windows), targets)


def predictor_from_dict(d) -> Predictor:
    if d["kind"] == "lstm":
        weights = {name: np.asarray(w, dtype=float) for name, w in d["weights"].items()}
        return LstmPredictor(PredictorConfig.from_dict(d["config"]), weights, d.get("loss_history"))
    if d["kind"] == "ar":
        return ArPredictor(d["coefficients"], d["intercept"], d["ridge"])
    raise ValueError(f"Unknown predictor kind {d['kind']!r}")


def save_predictor(predictor: Predictor, path):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(predictor.to_dict(), f, sort_keys=True)


def load_predictor(path) -> Predictor:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return predictor_from_dict(json.load(f))
    except OSError as e:
        raise DatasetError(f"Cannot read predictor {path}: {e}") from e
    except (json.decoder.JSONDecodeError, KeyError) as e:
        raise DatasetError(f"Malformed predictor file {path}: {e}") from e
