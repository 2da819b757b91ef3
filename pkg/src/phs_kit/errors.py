"""Exception types shared across the toolkit."""


class StructureError(ValueError):
    """Inconsistent dimensions or malformed building blocks.

    Raised for structural problems (shape mismatches, wrong block widths,
    bad configuration values).  Distinct from a validation *failure*, which
    is reported through the returned report objects.
    """


class DomainError(ValueError):
    """A state left the admissible domain of a Hamiltonian."""


class NewtonError(RuntimeError):
    """Newton iteration failed to converge.

    Attributes
    ----------
    step : int or None
        Time-step index at which the failure occurred (None for solves
        outside the time loop, e.g. the consistency projection).
    residual : float
        Norm of the last residual.
    """

    def __init__(self, message, step=None, residual=float("nan")):
        super().__init__(message)
        self.step = step
        self.residual = residual
