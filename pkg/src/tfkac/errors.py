"""Exception hierarchy shared by every module of the package."""


class FeynmanKacError(Exception):
    """Base class for all errors raised by :mod:`tfkac`."""


class ModelError(FeynmanKacError, ValueError):
    """A model parameter violates its admissible range."""


class GammaOutOfRange(ModelError):
    pass


class NegativeTempering(ModelError):
    pass


class NonpositiveDiffusion(ModelError):
    pass


class NegativePotential(ModelError):
    pass


class ReParameterNegative(ModelError):
    """``Re(p * U(x0)) < 0`` at some grid node."""


class BadPartition(FeynmanKacError, ValueError):
    pass


class OrderTooLarge(FeynmanKacError, ValueError):
    pass


class RuleMismatch(FeynmanKacError, ValueError):
    pass


class HistoryTooShort(FeynmanKacError, IndexError):
    pass


class CoefficientTableTooShort(FeynmanKacError, IndexError):
    pass


class SingularPivot(FeynmanKacError, ArithmeticError):
    pass


class SingularMatrix(FeynmanKacError, ArithmeticError):
    pass


class IncompatibleData(FeynmanKacError, ValueError):
    """Initial and boundary data disagree at the corners of the domain."""


class GridMismatch(FeynmanKacError, ValueError):
    pass


class EvaluatorFailure(FeynmanKacError, RuntimeError):
    pass


class ConfigOverflow(FeynmanKacError, OverflowError):
    pass


class ToleranceNotMet(FeynmanKacError, RuntimeError):
    pass


class BadConfig(FeynmanKacError, ValueError):
    pass


class IoFailure(FeynmanKacError, OSError):
    pass


class CellFailure(FeynmanKacError, RuntimeError):
    """A convergence-study cell failed; the message names the cell."""
