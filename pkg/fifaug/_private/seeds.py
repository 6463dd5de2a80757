import numpy as np


def derive_seed(seed, *path):
    """A child seed for the work item at `path` (segment index, repeat, ...).

    Depends only on (seed, path), so work can be scheduled in any order or on any
    thread and still draw the same numbers.
    """
    sequence = np.random.SeedSequence([int(seed)] + [int(p) for p in path])
    return int(sequence.generate_state(1, dtype=np.uint32)[0])
