"""Exception types shared across the toolkit."""


class SepnmfError(Exception):
    """Base class for all toolkit errors."""


class ZeroColumnError(SepnmfError):
    """A column that must be normalized has zero L1 norm."""

    def __init__(self, col):
        self.col = col
        super().__init__(f"column {col} has zero L1 norm")


class BadParameterError(SepnmfError):
    """A distribution or solver parameter is out of range."""


class NoConvergenceError(SepnmfError):
    """An iterative kernel hit its sweep/iteration cap without converging."""


class IterLimitError(SepnmfError):
    """An iterative solver hit its iteration cap."""


class DimensionError(SepnmfError):
    """Incompatible or out-of-range dimensions."""


class UnboundedError(SepnmfError):
    """The linear program is unbounded."""


class InfeasibleError(SepnmfError):
    """The optimization problem has no feasible point."""


class RankTooLargeError(SepnmfError):
    """Requested rank exceeds the number of distinct columns."""


class DegenerateResidualError(SepnmfError):
    """The residual matrix vanished before enough columns were selected."""


class NoQualifyingClusterError(SepnmfError):
    """No cluster prefix exceeds the score threshold.

    Carries the partial index set built before the failure.
    """

    def __init__(self, message, partial=None):
        self.partial = list(partial) if partial is not None else []
        super().__init__(message)


class MalformedCsvError(SepnmfError):
    """A benchmark CSV file does not match the expected schema."""
