from abc import ABCMeta


class StudyStorage(metaclass=ABCMeta):
    """Where studies keep their trial history.

    A study record is a dict {name, direction, seed, n_startup, trials}, every trial a dict
    {index, params, objective}. Implementations return copies; callers may not mutate
    stored state through them.
    """

    def get_study(self, name):
        """Return the study record, or None if there is no study with this name."""
        ...

    def create_study(self, name, direction, seed, n_startup):
        """Create an empty study. Must return the new record."""
        ...

    def append_trial(self, name, trial):
        ...

    def delete_study(self, name):
        """Remove the study; returns the removed record or None."""
        ...

    def study_names(self):
        ...
