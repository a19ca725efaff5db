"""Exception types raised across the package."""


class NeuroLassoError(Exception):
    """Base class for all library-specific errors."""


class DimensionMismatchError(NeuroLassoError, ValueError):
    """Inputs whose shapes cannot be combined.

    Carries both shapes so callers can report them without re-deriving.
    """

    def __init__(self, what, expected, got):
        self.expected = tuple(expected)
        self.got = tuple(got)
        super().__init__(f"{what}: expected shape {self.expected}, got {self.got}")


class NonFiniteInputError(NeuroLassoError, ValueError):
    """An input array contains NaN or infinite entries."""


class DualUnavailableError(NeuroLassoError, RuntimeError):
    """The dual objective cannot be evaluated.

    Raised when the Gram matrix is numerically singular, or when the cache
    was built in matrix-free mode and no dense Gram factor exists.
    """


class OracleInconclusiveError(NeuroLassoError, RuntimeError):
    """The exhaustive sign-pattern search accepted no candidate.

    Only possible under degeneracy (every viable support had a singular
    restricted Gram); a well-posed instance always yields a solution.
    """


class MatrixFormatError(NeuroLassoError, ValueError):
    """A matrix/vector file does not match the documented on-disk format."""
