"""Parameter ranges and the samplers that propose values for them.

Samplers work in an internal coordinate: the log of the value for log-scale floats, and
a widened real interval [low - 0.5, high + 0.5] for integers, so every range is a plain
interval to them.
"""
import math
from abc import ABCMeta, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp
from scipy.stats import norm

from .errors import InsufficientHistory, InvalidRange

DEFAULT_GAMMA = 0.25
DEFAULT_N_CANDIDATES = 24
MIN_BANDWIDTH_FRACTION = 0.01


@dataclass(frozen=True)
class FloatRange:
    low: float
    high: float
    log: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.low) and math.isfinite(self.high)) or self.low >= self.high:
            raise InvalidRange(f"Float range needs low < high, got [{self.low}, {self.high}]")
        if self.log and self.low <= 0:
            raise InvalidRange(f"Log-scale range needs low > 0, got {self.low}")

    @property
    def internal_bounds(self):
        if self.log:
            return math.log(self.low), math.log(self.high)
        return float(self.low), float(self.high)

    def to_internal(self, value):
        return math.log(value) if self.log else float(value)

    def from_internal(self, u):
        value = math.exp(u) if self.log else float(u)
        return min(max(value, self.low), self.high)

    def contains(self, value):
        return self.low <= value <= self.high


@dataclass(frozen=True)
class IntRange:
    """Inclusive integer range."""

    low: int
    high: int

    def __post_init__(self):
        if int(self.low) != self.low or int(self.high) != self.high or self.low >= self.high:
            raise InvalidRange(f"Integer range needs integer low < high, got [{self.low}, {self.high}]")

    @property
    def internal_bounds(self):
        return self.low - 0.5, self.high + 0.5

    def to_internal(self, value):
        return float(value)

    def from_internal(self, u):
        return int(min(max(round(u), self.low), self.high))

    def contains(self, value):
        return self.low <= value <= self.high and int(value) == value


def sample_uniform(space, rng):
    low, high = space.internal_bounds
    return space.from_internal(rng.uniform(low, high))


class ParzenEstimator:
    """Mixture of Gaussians truncated to [low, high], one per observation plus a wide prior.

    Each observation's bandwidth is the larger of the gaps to its neighbours (the interval
    ends count as neighbours), kept between 1% of the range and the whole range.
    """

    def __init__(self, observations, low, high):
        observations = np.asarray(observations, dtype=float)
        width = high - low
        ordered = np.sort(observations)
        padded = np.concatenate([[low], ordered, [high]])
        gaps = np.maximum(padded[1:-1] - padded[:-2], padded[2:] - padded[1:-1])
        sigmas = np.empty_like(observations)
        sigmas[np.argsort(observations, kind="stable")] = gaps
        sigmas = np.clip(sigmas, MIN_BANDWIDTH_FRACTION * width, width)

        self.low, self.high = low, high
        self.mus = np.concatenate([observations, [(low + high) / 2]])
        self.sigmas = np.concatenate([sigmas, [width]])
        self.weights = np.full(len(self.mus), 1.0 / len(self.mus))
        self._cdf_low = norm.cdf((low - self.mus) / self.sigmas)
        self._cdf_high = norm.cdf((high - self.mus) / self.sigmas)

    def sample(self, rng, size):
        components = rng.choice(len(self.mus), size=size, p=self.weights)
        u = rng.uniform(self._cdf_low[components], self._cdf_high[components])
        samples = self.mus[components] + self.sigmas[components] * norm.ppf(u)
        return np.clip(samples, self.low, self.high)

    def log_pdf(self, x):
        x = np.asarray(x, dtype=float)[:, None]
        log_mass = np.log(np.maximum(self._cdf_high - self._cdf_low, 1e-300))
        log_components = norm.logpdf(x, loc=self.mus, scale=self.sigmas) - log_mass
        return logsumexp(log_components + np.log(self.weights), axis=1)


def tpe_sample(history, space, gamma=DEFAULT_GAMMA, n_candidates=DEFAULT_N_CANDIDATES, rng=None):
    """Propose a value from (value, objective) pairs, lower objectives being better.

    The best `gamma` fraction of the history forms the density l(x), the rest g(x); of
    `n_candidates` draws from l the one maximizing l(x)/g(x) is returned.
    """
    if len(history) < 2:
        raise InsufficientHistory(f"TPE needs at least 2 completed observations, got {len(history)}")
    rng = rng if rng is not None else np.random.default_rng()

    values = np.array([space.to_internal(v) for v, _ in history], dtype=float)
    objectives = np.array([o for _, o in history], dtype=float)
    order = np.argsort(objectives, kind="stable")
    n_good = max(1, math.ceil(gamma * len(history)))

    low, high = space.internal_bounds
    good = ParzenEstimator(values[order[:n_good]], low, high)
    rest = ParzenEstimator(values[order[n_good:]], low, high)

    candidates = good.sample(rng, n_candidates)
    scores = good.log_pdf(candidates) - rest.log_pdf(candidates)
    return space.from_internal(candidates[int(np.argmax(scores))])


class Sampler(metaclass=ABCMeta):
    """Contract for samplers.

    `history` lists (value, objective) of earlier completed trials, objectives oriented
    so that lower is better.
    """

    @abstractmethod
    def sample(self, history, space, rng):
        ...


class RandomSampler(Sampler):
    """Uniform sampling; ignores the history."""

    def sample(self, history, space, rng):
        return sample_uniform(space, rng)


class TpeSampler(Sampler):
    def __init__(self, gamma=DEFAULT_GAMMA, n_candidates=DEFAULT_N_CANDIDATES):
        if not 0 < gamma < 1:
            raise ValueError(f"gamma must be in (0, 1), got {gamma}")
        self.gamma = gamma
        self.n_candidates = n_candidates

    def sample(self, history, space, rng):
        if len(history) < 2:
            return sample_uniform(space, rng)
        return tpe_sample(history, space, gamma=self.gamma, n_candidates=self.n_candidates, rng=rng)
