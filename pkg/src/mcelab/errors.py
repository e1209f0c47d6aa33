"""Exception types shared across the lab."""


class DomainError(ValueError):
    """An argument lies outside the domain where the operation is defined."""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature ran out of budget before meeting its tolerance.

    The best estimate and its error bound are kept so callers can decide
    whether the partial answer is usable.
    """

    def __init__(self, message, estimate, error):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error


class SolverError(RuntimeError):
    """The radial initial-value solver failed (e.g. step-size underflow)."""


class EigenSolveError(RuntimeError):
    """The smallest generalized eigenvalue could not be bracketed."""
