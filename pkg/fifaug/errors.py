"""Exceptions raised by fifaug.

Every error carries the process exit code the CLI reports for it.
"""


class FifaugError(Exception):
    """Base class for all fifaug errors."""
    exit_code = 3


class DatasetError(FifaugError, OSError):
    """A dataset file is missing, unreadable or malformed."""
    exit_code = 1


# core_fif

class NonMonotonicAbscissa(FifaugError, ValueError):
    pass


class ScalingOutOfRange(FifaugError, ValueError):
    """Some vertical scaling factor has |s_i| >= 1."""


class SegmentTooShort(FifaugError, ValueError):
    pass


class IndexOutOfRange(FifaugError, IndexError):
    pass


class AbscissaOutOfRange(FifaugError, ValueError):
    pass


class IterationLimitExceeded(FifaugError, RuntimeError):
    pass


class DegenerateSeries(FifaugError, ValueError):
    """An interpolated series has no generated points to verify."""


# segmentation

class StrictModeIndivisible(FifaugError, ValueError):
    pass


class SeriesTooShort(FifaugError, ValueError):
    pass


class BoundaryMismatch(FifaugError, ValueError):
    pass


# analysis

class SeriesTooShortForHurst(SeriesTooShort):
    pass


class ConstantSeries(FifaugError, ValueError):
    pass


class SingularRegression(FifaugError, ValueError):
    pass


class LengthMismatch(FifaugError, ValueError):
    pass


class EmptyInput(FifaugError, ValueError):
    pass


# optimizer

class DuplicateParameterName(FifaugError, ValueError):
    pass


class InvalidRange(FifaugError, ValueError):
    pass


class InsufficientHistory(FifaugError, ValueError):
    pass


class ObjectiveFailure(FifaugError, RuntimeError):
    """The objective raised or returned a non-finite value."""

    def __init__(self, trial_index, cause):
        super().__init__(f"Objective failed in trial {trial_index}: {cause}")
        self.trial_index = trial_index
        self.cause = cause


# strategies

class AllPointsEqual(FifaugError, ValueError):
    pass


class FactorMismatch(FifaugError, ValueError):
    pass


# pipeline

class DegenerateInverse(FifaugError, ValueError):
    pass


class DomainViolation(FifaugError, ValueError):
    pass


class WindowTooLarge(FifaugError, ValueError):
    pass


class WindowWidthMismatch(FifaugError, ValueError):
    pass


class NonFiniteLoss(FifaugError, RuntimeError):
    def __init__(self, epoch, loss):
        super().__init__(f"Training loss became {loss} in epoch {epoch}; the learning rate is probably too high")
        self.epoch = epoch
        self.loss = loss


class SingularSystem(FifaugError, ValueError):
    pass
