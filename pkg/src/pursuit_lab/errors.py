"""Exception types shared across the package."""


class DegenerateInputError(ValueError):
    """Input is numerically degenerate (rank deficient, zero variance, ...)."""


class NotPositiveDefiniteError(ValueError):
    """Covariance matrix is not positive definite even after jitter."""


class FitConvergenceError(RuntimeError):
    """Iterative fit failed to converge; carries the best parameters seen."""

    def __init__(self, message, best_params=None):
        super().__init__(message)
        self.best_params = best_params


class CsvParseError(ValueError):
    """Malformed CSV input, with 1-based row/column location."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column
