"""Exception hierarchy shared by all modules."""


class OpSignError(Exception):
    """Base class for every error raised by this package."""


class ShapeMismatch(OpSignError, ValueError):
    pass


class NonFinite(OpSignError, ValueError):
    pass


class NonSquare(ShapeMismatch):
    pass


class AsymmetricInput(OpSignError, ValueError):
    pass


class NotSelfAdjoint(AsymmetricInput):
    pass


class NoConvergence(OpSignError, ArithmeticError):
    pass


class NumericallySingular(OpSignError, ArithmeticError):
    """Raised when a matrix fails the smallest/largest singular value gate.

    ``ratio`` is the observed ratio and ``unit`` names the block unit that
    was being inverted, when the caller knows it.
    """

    def __init__(self, ratio, unit=None):
        self.ratio = float(ratio)
        self.unit = unit
        where = f" ({unit})" if unit else ""
        super().__init__(f"numerically singular{where}: s_min/s_max = {self.ratio:.3e}")

    def named(self, unit):
        return NumericallySingular(self.ratio, unit)


class OrderTooSmall(OpSignError, ValueError):
    pass


class NotBidiagonal(OpSignError, ValueError):
    pass


class NotPositiveDefinite(OpSignError, ValueError):
    pass


class NonFiniteEvaluation(OpSignError, ArithmeticError):
    pass
