"""Error types shared across the package.

Plain ValueError is used for domain errors (bad arguments); the classes here
mark failures of a numerical construction itself.
"""

__all__ = ["TruncationError", "NumericalError"]


class TruncationError(RuntimeError):
    """A finite truncation was too small to meet the requested tolerance.

    Carries the achieved residual so callers can enlarge the truncation.
    """

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class NumericalError(RuntimeError):
    """A numerical routine failed to converge or lost positivity."""
