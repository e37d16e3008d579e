"""Errors raised by the functional map toolkit."""


class FmapError(ValueError):
    """Base class for all toolkit errors."""


class DimensionMismatchError(FmapError):
    """Array shapes are inconsistent with each other."""


class InvalidParameterError(FmapError):
    """A scalar or enum argument is outside its valid range."""


class MatrixFormatError(FmapError):
    """A CSV matrix file is ragged or holds non-numeric fields."""


class RankDeficientError(FmapError):
    """A basis does not have full column rank."""

    def __init__(self, rank: int, expected: int) -> None:
        self.rank = rank
        self.expected = expected
        super().__init__(f"Basis is rank deficient: rank {rank}, expected {expected}")


class SingularSystemError(FmapError):
    """A linear system of the functional map solve is singular."""

    def __init__(self, row: int | None, detail: str = "") -> None:
        self.row = row
        where = f"row {row}" if row is not None else "the vectorized system"
        message = f"Singular linear system at {where}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class OracleSizeError(FmapError):
    """The k^2 x k^2 oracle was asked for a spectral resolution above its guard."""

    def __init__(self, k: int, max_k: int) -> None:
        self.k = k
        self.max_k = max_k
        super().__init__(f"Full oracle refuses k={k}; the limit is k <= {max_k}")


class MemoryCapExceededError(FmapError):
    """The batched left-hand-side tensor would exceed the configured memory cap."""

    def __init__(self, required_bytes: int, cap_bytes: int) -> None:
        self.required_bytes = required_bytes
        self.cap_bytes = cap_bytes
        super().__init__(
            f"Batched solve needs {required_bytes} bytes, above the cap of {cap_bytes} bytes"
        )
