"""Shared exception types."""


class GridMismatchError(ValueError):
    """Fields living on different grids were combined."""


class PositivityError(ValueError):
    """An operation required a strictly positive field and did not get one."""


class ConeError(ValueError):
    """A field left the admissible cone (e.g. the pairing <-Du, v> is not positive)."""


class DisconnectedDomainError(ValueError):
    """A 2D mask produced a disconnected interior."""


class IndefiniteOperatorError(RuntimeError):
    """A conjugate-gradient solve encountered a direction of negative curvature."""


class ConvergenceError(RuntimeError):
    """An iterative method exhausted its budget before meeting its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class BlowUpError(RuntimeError):
    """A monotone iteration exceeded its sup-norm cap (no-solution signal)."""

    def __init__(self, message, sup_norm=None, iterations=None):
        super().__init__(message)
        self.sup_norm = sup_norm
        self.iterations = iterations
