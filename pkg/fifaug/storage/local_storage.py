import copy
import json
import logging
import threading

import numpy as np

from .study_storage import StudyStorage
from ._synchronized import synchronized

logger = logging.getLogger(__name__)


class LocalStorage(StudyStorage):
    """Studies in memory, optionally mirrored to a JSON file after every write."""

    def __init__(self, filename=None):
        # { study_name -> {name, direction, seed, n_startup, trials: [...]} }
        self.studies = {}
        self.filename = filename
        self._lock = threading.RLock()

        if filename:
            try:
                with open(filename, "r", encoding="utf-8") as f:
                    self.studies = json.load(f)
            except IOError:
                pass
            except json.decoder.JSONDecodeError as e:
                logger.warning(
                    f"Error loading {filename}. The next write operation will overwrite it with a clean copy: {e}"
                )

    @synchronized
    def get_study(self, name):
        return copy.deepcopy(self.studies.get(name))

    @synchronized
    def create_study(self, name, direction, seed, n_startup):
        if name in self.studies:
            raise ValueError(f"Study {name!r} already exists")
        self.studies[name] = {
            "name": name,
            "direction": direction,
            "seed": seed,
            "n_startup": n_startup,
            "trials": [],
        }
        self._flush()
        return self.get_study(name)

    @synchronized
    def append_trial(self, name, trial):
        if name not in self.studies:
            raise KeyError(f"No study named {name!r}")
        trials = self.studies[name]["trials"]
        if trial["index"] != len(trials):
            raise ValueError(f"Expected trial {len(trials)} of study {name!r}, got {trial['index']}")
        trials.append(copy.deepcopy(trial))
        self._flush()

    @synchronized
    def delete_study(self, name):
        ret = self.studies.pop(name, None)
        if ret is not None:
            self._flush()
        return ret

    @synchronized
    def study_names(self):
        return sorted(self.studies.keys())

    def _flush(self):
        if self.filename:
            try:
                with open(self.filename, "w", encoding="utf-8") as f:
                    json.dump(self.studies, f, indent=2, sort_keys=True, cls=NumpyEncoder)
            except IOError as e:
                logger.warning(f"Could not write studies to {self.filename}: {e}")


class NumpyEncoder(json.JSONEncoder):
    """Serializes numpy scalars and arrays as plain JSON numbers and lists."""

    def default(self, obj):
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        return json.JSONEncoder.default(self, obj)
