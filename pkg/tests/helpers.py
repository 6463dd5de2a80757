import contextlib
import os
import tempfile

import numpy as np
from hypothesis import strategies as st

from fifaug.series import TimeSeries

GAMMA_PREFIX = [(1, 10), (2, 14), (3, 19), (4, 26), (5, 35), (6, 46)]


def try_to_delete(filename):
    if os.path.exists(filename):
        os.unlink(filename)


@contextlib.contextmanager
def with_clean_file(filename):
    """Remove file before starting, and after running.

    Intended for tempfiles used in tests.
    """
    try_to_delete(filename)
    try:
        yield
    finally:
        try_to_delete(filename)


def temp_path(name):
    return os.path.join(tempfile.gettempdir(), name)


def noisy_line(n, slope=2.0, noise=0.5, seed=0):
    rng = np.random.default_rng(seed)
    x = np.arange(n, dtype=float)
    return TimeSeries(x, slope * x + rng.normal(0, noise, n))


def max_deviation_from_linear(segment, interpolated):
    return float(np.max(np.abs(interpolated.y - np.interp(interpolated.x, segment.x, segment.y))))


@st.composite
def segments(draw, min_size=3, max_size=30):
    """Segments with strictly increasing, unevenly spaced abscissae."""
    n = draw(st.integers(min_value=min_size, max_value=max_size))
    gaps = draw(st.lists(st.floats(min_value=0.1, max_value=10.0), min_size=n - 1, max_size=n - 1))
    x0 = draw(st.floats(min_value=-100.0, max_value=100.0))
    ys = draw(st.lists(st.floats(min_value=-100.0, max_value=100.0), min_size=n, max_size=n))
    return TimeSeries(x0 + np.concatenate([[0.0], np.cumsum(gaps)]), ys)
