"""Timing and counting hooks for the hot paths.

Library code reports through `timed_as` and `log_counter`. Nothing is measured until a
receiver is installed; `PerfTally` is a receiver pair that sums everything per key.
"""
import functools
import logging
import threading
import time
from collections import defaultdict

TIMER_RECEIVER = None
COUNTER_RECEIVER = None


def set_timer_receiver(timer_receiver):
    global TIMER_RECEIVER
    TIMER_RECEIVER = timer_receiver


def set_counter_receiver(counter_receiver):
    global COUNTER_RECEIVER
    COUNTER_RECEIVER = counter_receiver


def timed_as(key):
    """Report the duration of every call, in milliseconds, to the timer receiver."""
    def decorator(fn):
        @functools.wraps(fn)
        def decorated(*args, **kwargs):
            receiver = TIMER_RECEIVER
            if receiver is None:
                return fn(*args, **kwargs)
            start = time.perf_counter()
            try:
                return fn(*args, **kwargs)
            finally:
                receiver(key, (time.perf_counter() - start) * 1000)

        return decorated
    return decorator


def log_counter(key, increment=1):
    receiver = COUNTER_RECEIVER
    if receiver is not None:
        receiver(key, increment)


class PerfTally:
    """Per-key call counts, total milliseconds and counter sums.

    Safe to feed from worker threads.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self.calls = defaultdict(int)
        self.millis = defaultdict(float)
        self.counts = defaultdict(int)

    def record_time(self, key, ms):
        with self._lock:
            self.calls[key] += 1
            self.millis[key] += ms

    def record_count(self, key, increment):
        with self._lock:
            self.counts[key] += increment

    def install(self):
        set_timer_receiver(self.record_time)
        set_counter_receiver(self.record_count)
        return self

    @staticmethod
    def uninstall():
        set_timer_receiver(None)
        set_counter_receiver(None)

    def summary(self):
        with self._lock:
            return {
                "timers": {k: {"calls": self.calls[k], "total_ms": self.millis[k]} for k in sorted(self.calls)},
                "counters": {k: self.counts[k] for k in sorted(self.counts)},
            }

    def log_summary(self, logger, level=logging.DEBUG):
        summary = self.summary()
        for key, timer in summary["timers"].items():
            logger.log(level, "%s: %d calls, %.1f ms", key, timer["calls"], timer["total_ms"])
        for key, count in summary["counters"].items():
            logger.log(level, "%s: %d", key, count)
