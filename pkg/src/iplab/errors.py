"""Exception types raised by iplab.

Invalid arguments raise plain :class:`ValueError`; the classes here cover
failures a caller may want to catch separately.
"""


class ConvergenceError(ArithmeticError):
    """An iterative eigensolver hit its iteration cap."""

    def __init__(self, index, max_iter):
        self.index = index
        self.max_iter = max_iter
        super().__init__(
            f"eigenvalue {index} did not converge within {max_iter} iterations"
        )


class NoMinimumError(ArithmeticError):
    """The variational energy has no interior minimum in the search bracket."""


class InsufficientDataError(ValueError):
    """Too few valid points for a fit."""
