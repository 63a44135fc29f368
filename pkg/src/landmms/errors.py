class LandMmsError(Exception):
    """Base class for errors raised by this package."""


class InstanceFormatError(LandMmsError, ValueError):
    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class NoFeasiblePartition(LandMmsError):
    pass


class BudgetExceeded(LandMmsError):
    def __init__(self, message: str, estimate: int | None = None) -> None:
        super().__init__(message)
        self.estimate = estimate


class NoSelection(LandMmsError):
    pass


class AllocationInvariantError(LandMmsError, AssertionError):
    """An internal contract failed; this is a bug, not an input error."""
