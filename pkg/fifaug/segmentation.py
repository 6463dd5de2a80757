import logging
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryMismatch, SeriesTooShort, StrictModeIndivisible
from .fif import InterpolatedSeries
from .series import TimeSeries

logger = logging.getLogger(__name__)

DEFAULT_SEQUENCE_SIZE = 10
MIN_SEGMENT_LENGTH = 3
BOUNDARY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Segment:
    """A slice of a parent series; start_index and end_index are inclusive."""

    points: TimeSeries
    start_index: int
    end_index: int

    @property
    def length(self):
        return self.end_index - self.start_index + 1


@dataclass(frozen=True)
class SplitMode:
    sequence_size: int = DEFAULT_SEQUENCE_SIZE
    strict: bool = False

    def __post_init__(self):
        if self.sequence_size < MIN_SEGMENT_LENGTH:
            raise ValueError(f"sequence_size must be >= {MIN_SEGMENT_LENGTH}, got {self.sequence_size}")


def split(series: TimeSeries, sequence_size=DEFAULT_SEQUENCE_SIZE, strict=False):
    """Split into segments that overlap by exactly one boundary point.

    In strict mode every segment has `sequence_size` points. Otherwise the last segment
    may be shorter (at least 3 points); a leftover of fewer than 3 points is absorbed
    into the segment before it.
    """
    mode = SplitMode(sequence_size, strict)
    n = len(series)
    stride = mode.sequence_size - 1

    if strict:
        series.require_length(mode.sequence_size)
        if (n - 1) % stride != 0:
            raise StrictModeIndivisible(
                f"{n} points cannot be split into segments of {mode.sequence_size} "
                f"({n - 1} gaps is not a multiple of {stride})")
    else:
        series.require_length(4)

    bounds = []
    start = 0
    while start < n - 1:
        end = min(start + stride, n - 1)
        bounds.append([start, end])
        start = end

    if len(bounds) > 1 and bounds[-1][1] - bounds[-1][0] + 1 < MIN_SEGMENT_LENGTH:
        leftover = bounds.pop()
        bounds[-1][1] = leftover[1]
        logger.info("Absorbed a %d-point leftover into the segment starting at %d",
                    leftover[1] - leftover[0], bounds[-1][0])

    return [Segment(series.slice(start, end), start, end) for start, end in bounds]


def reunite(segments):
    """Concatenate interpolated segments in order, keeping each shared boundary point once."""
    if not segments:
        raise ValueError("Nothing to reunite")

    parts_x, parts_y = [], []
    previous = None
    for k, segment in enumerate(segments):
        points = segment.points if isinstance(segment, InterpolatedSeries) else segment
        if previous is None:
            parts_x.append(points.x)
            parts_y.append(points.y)
        else:
            last = (previous.x[-1], previous.y[-1])
            first = (points.x[0], points.y[0])
            scale = max(1.0, abs(last[0]), abs(last[1]))
            if abs(last[0] - first[0]) > BOUNDARY_TOLERANCE * scale or abs(last[1] - first[1]) > BOUNDARY_TOLERANCE * scale:
                raise BoundaryMismatch(f"Segment {k} starts at {first}, but segment {k - 1} ends at {last}")
            parts_x.append(points.x[1:])
            parts_y.append(points.y[1:])
        previous = points

    return TimeSeries(np.concatenate(parts_x), np.concatenate(parts_y))
