"""Exception hierarchy.

Validation errors mean the input violates a mathematical hypothesis and the
computation was refused; numerical errors mean an iteration failed to converge.
The CLI maps them to exit codes 2 and 3 respectively.
"""


class CytorusError(Exception):
    pass


class ValidationError(CytorusError):
    """Input rejected before any solve was attempted."""


class InvarianceError(ValidationError):
    """A field coefficient does not live on the declared base torus."""


class HypothesisError(ValidationError):
    """A geometric hypothesis (Lagrangian fibres, leaf constancy, ...) fails."""


class FrameError(ValidationError):
    """No adapted coframe exists for the given metric/symplectic pair."""


class NumericalError(CytorusError):
    """An iterative solve failed; carries diagnostic history where available."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = history or []


class LinearSolveError(NumericalError):
    pass


class ContinuationError(NumericalError):
    pass
