"""Exception hierarchy.

Every error raised deliberately by the package derives from
:class:`AntselError`, which is itself a :class:`ValueError` so that callers
treating bad input generically keep working.
"""


class AntselError(ValueError):
    """Base class for all package errors."""


class DimensionMismatch(AntselError):
    pass


# linear algebra


class NotPositiveDefinite(AntselError):
    """Cholesky met a pivot at or below the positive-definiteness tolerance."""


class SingularMatrix(AntselError):
    pass


class NotPSD(AntselError):
    """An eigenvalue fell below the negative clipping threshold."""


class RankDeficient(AntselError):
    pass


# channel model


class InvalidPhi(AntselError):
    pass


class InvalidTau(AntselError):
    pass


class InvalidVariance(AntselError):
    pass


# selection


class InvalidSparsity(AntselError):
    pass


class TooLarge(AntselError):
    pass


# harness


class InvalidParams(AntselError):
    pass


class InvalidAxisValue(AntselError):
    def __init__(self, axis, value, reason):
        super().__init__(f"invalid value {value!r} for sweep axis {axis!r}: {reason}")
        self.axis = axis
        self.value = value
