import functools


def synchronized(method):
    """Run `method` while holding `self._lock`.

    Each storage instance owns its lock, so two studies files never block each other.
    The lock must be re-entrant: writers flush through other synchronized methods.
    """

    @functools.wraps(method)
    def wrapper(self, *args, **kwargs):
        with self._lock:
            return method(self, *args, **kwargs)

    return wrapper
