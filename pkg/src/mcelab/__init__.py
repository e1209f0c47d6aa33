"""Numerical laboratory for stable solutions of the prescribed mean curvature equation."""

from .errors import DomainError, EigenSolveError, QuadratureError, SolverError

__version__ = "0.1.0"

__all__ = ["DomainError", "EigenSolveError", "QuadratureError", "SolverError", "__version__"]
