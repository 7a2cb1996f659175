"""Exception types raised across the package."""


class LoopCliffError(Exception):
    """Base class for all errors raised by loopcliff."""


class DimensionMismatch(LoopCliffError, ValueError):
    pass


class LagrangianError(LoopCliffError, ValueError):
    """Frame is not orthonormal or not isotropic, or has the wrong defect."""


class IllConditionedError(LoopCliffError, ArithmeticError):
    """A rank or parity decision fell inside the tolerance gray zone."""


class TruncationError(LoopCliffError, ValueError):
    """A Fourier support is too large for the chosen cutoff."""


class NoSolutionError(LoopCliffError, ArithmeticError):
    pass


class InhomogeneousError(LoopCliffError, ArithmeticError):
    pass


class NotOrthogonalError(LoopCliffError, ValueError):
    pass


class PhaseError(LoopCliffError, ArithmeticError):
    """A triple-product phase is not an m-th root of unity."""


class NotClosedError(LoopCliffError, ValueError):
    """A cochain that must be a cocycle is not closed."""


class InconsistentCenterError(LoopCliffError, ArithmeticError):
    """Graded center is trivial but the ungraded center has dimension > 2."""


class FormulaMismatchError(LoopCliffError, ArithmeticError):
    """Two independent evaluations of the same quantity disagree."""
