from dataclasses import dataclass

import numpy as np

from .errors import NonMonotonicAbscissa, SeriesTooShort


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """An ordered sequence of (x, y) samples with strictly increasing x.

    The arrays are float64 and read-only; operations return new series.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        y = np.array(self.y, dtype=float)
        if x.ndim != 1 or y.ndim != 1 or len(x) != len(y):
            raise ValueError(f"x and y must be 1-D and of equal length, got {x.shape} and {y.shape}")
        if np.any(np.diff(x) <= 0):
            raise NonMonotonicAbscissa(f"x values must be strictly increasing: {x.tolist()}")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @staticmethod
    def from_values(values):
        """Series with index abscissae 0, 1, 2, ..."""
        values = np.asarray(values, dtype=float)
        return TimeSeries(np.arange(len(values), dtype=float), values)

    @staticmethod
    def from_points(points):
        points = list(points)
        return TimeSeries([p[0] for p in points], [p[1] for p in points])

    def points(self):
        return list(zip(self.x.tolist(), self.y.tolist()))

    def slice(self, start, end):
        """Points start..end inclusive."""
        return TimeSeries(self.x[start:end + 1], self.y[start:end + 1])

    def require_length(self, minimum, error=SeriesTooShort):
        if len(self) < minimum:
            raise error(f"Need at least {minimum} points, got {len(self)}")

    def __len__(self):
        return len(self.x)

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return np.array_equal(self.x, other.x) and np.array_equal(self.y, other.y)

    def __repr__(self):
        return f"TimeSeries(n={len(self)}, x=[{self.x[:1]}..{self.x[-1:]}])"
