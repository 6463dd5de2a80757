import datetime
import time
from abc import ABCMeta, abstractmethod


class Cancel(metaclass=ABCMeta):
    """Token polled by long loops (study trials, tuning) before each unit of work."""

    @staticmethod
    def after_timeout(duration):
        """Cancelled once `duration` (a timedelta or seconds) has passed."""
        if isinstance(duration, datetime.timedelta):
            duration = duration.total_seconds()
        return TimeoutCancellation(time.monotonic() + duration)

    @staticmethod
    def never():
        return NeverCancellation()

    @abstractmethod
    def is_cancelled(self):
        ...


class TimeoutCancellation(Cancel):
    def __init__(self, deadline):
        self.deadline = deadline

    def is_cancelled(self):
        return time.monotonic() >= self.deadline


class NeverCancellation(Cancel):
    def is_cancelled(self):
        return False
