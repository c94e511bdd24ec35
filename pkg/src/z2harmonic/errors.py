"""Exception types shared by all modules.

The CLI maps these onto exit codes: PreconditionError -> 2,
BranchProximityError -> 3, NumericFailure / ContinuationError -> 1.
"""


class PreconditionError(ValueError):
    """An input violates a documented precondition."""


class NumericFailure(RuntimeError):
    """A numerical routine failed to reach its target accuracy.

    Carries the best available estimate so callers can triage.
    """

    def __init__(self, message, best_value=None, best_error=None):
        super().__init__(message)
        self.best_value = best_value
        self.best_error = best_error


class BranchProximityError(ValueError):
    """A point is too close to the branching ellipsoid for sheet-resolved work."""


class ContinuationError(RuntimeError):
    """Sheet tracking along a path became ambiguous.

    `index` is the first offending step.
    """

    def __init__(self, message, index):
        super().__init__(message)
        self.index = index
