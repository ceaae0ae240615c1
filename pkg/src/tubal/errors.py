"""Exception hierarchy shared by all tubal modules."""


class TubalError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(TubalError, ValueError):
    """Shapes or tubal lengths are not conformable."""


class TransformMismatchError(TubalError, ValueError):
    """Two operands were built against different transforms."""


class InvalidTransformError(TubalError, ValueError):
    """A user-supplied transform matrix is singular or malformed."""


class UnsupportedTransformError(TubalError):
    """The operation requires a scaled-unitary transform (L = cW)."""


class InvalidInputError(TubalError, ValueError):
    """Input data is non-finite or otherwise unusable."""


class RankError(TubalError, ValueError):
    """A truncation rank is outside the admissible range."""


class NumericalError(TubalError, ArithmeticError):
    """A result that should be real carries a non-negligible imaginary part."""
