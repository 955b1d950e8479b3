"""Exception hierarchy shared by the simulation, fitting and selection code."""


class SurvselError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(SurvselError, ValueError):
    pass


class GenerationError(SurvselError):
    """Raised when a simulated quantity cannot be produced (e.g. a non-finite
    linear predictor)."""


class FitError(SurvselError):
    """Base class for model-fitting failures.

    Selectors catch this class and record a failed fit instead of aborting.
    """


class InsufficientDataError(FitError):
    pass


class NonIdentifiableError(FitError):
    pass


class SeparationError(FitError):
    pass


class DivergenceError(FitError):
    pass


class SingularityError(FitError):
    pass


class ConvergenceError(FitError):
    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class DegeneratePathError(FitError):
    pass


class FoldFailureError(FitError):
    pass
