from .study_storage import StudyStorage
from .local_storage import LocalStorage

__all__ = ["StudyStorage", "LocalStorage"]
