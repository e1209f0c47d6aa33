"""Closed-form right-hand sides ``f`` (with ``f'``) of the curvature equation.

Every family evaluates on scalars or numpy arrays. The counterexample
family is evaluated in log space so the large negative exponents near
``a -> 1`` underflow to zero instead of producing ``inf/inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DomainError

__all__ = [
    "Nonlinearity",
    "Zero",
    "Constant",
    "Polynomial",
    "CounterexampleF",
    "Rescaled",
    "eval_f",
    "eval_fprime",
    "rescale",
    "parse_nonlinearity",
]


class Nonlinearity:
    """Base class; subclasses implement :meth:`f` and :meth:`fprime`."""

    def f(self, t):
        raise NotImplementedError

    def fprime(self, t):
        raise NotImplementedError

    def sup_fprime(self, lo: float, hi: float, samples: int = 2001) -> float:
        """Sampled upper bound of ``f'`` on ``[lo, hi]`` (for eigen shifts)."""
        t = np.linspace(lo, hi, samples)
        return float(np.max(self.fprime(t)))


def _out(t, values):
    return float(values) if np.ndim(t) == 0 else values


@dataclass(frozen=True)
class Zero(Nonlinearity):
    def f(self, t):
        return _out(t, np.zeros_like(np.asarray(t, dtype=float)))

    def fprime(self, t):
        return _out(t, np.zeros_like(np.asarray(t, dtype=float)))


@dataclass(frozen=True)
class Constant(Nonlinearity):
    lam: float

    def f(self, t):
        return _out(t, np.full_like(np.asarray(t, dtype=float), self.lam))

    def fprime(self, t):
        return _out(t, np.zeros_like(np.asarray(t, dtype=float)))


@dataclass(frozen=True)
class Polynomial(Nonlinearity):
    """``f(t) = sum_k coeffs[k] * t**k`` (ascending order)."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not self.coeffs:
            raise DomainError("polynomial needs at least one coefficient")

    def f(self, t):
        return _out(t, P.polyval(np.asarray(t, dtype=float), self.coeffs))

    def fprime(self, t):
        return _out(t, P.polyval(np.asarray(t, dtype=float), P.polyder(self.coeffs)))


@dataclass(frozen=True)
class CounterexampleF(Nonlinearity):
    """Nonlinearity solved by the slab profile ``|x1|**(1-a)``, ``1/2 < a < 1``.

    For ``t > 0``, with ``y = t**(2a/(1-a))`` and ``c = (1-a)**2``::

        f(t)  = a(1-a) t**((2a-1)/(1-a)) / (y + c)**1.5
        f'(t) = a (c(2a-1) - (1+a) y) t**((3a-2)/(1-a)) / (y + c)**2.5

    which is the published formula with the powers of ``y`` cleared from
    the denominator. ``f' (0+)`` vanishes only for ``a > 2/3``.
    """

    a: float

    def __post_init__(self):
        if not 0.5 < self.a < 1.0:
            raise DomainError(f"counterexample needs 1/2 < a < 1, got {self.a}")

    def _logs(self, t):
        a = self.a
        t = np.asarray(t, dtype=float)
        pos = t > 0
        lt = np.log(np.where(pos, t, 1.0))
        c = (1 - a) ** 2
        log_yc = np.logaddexp(2 * a / (1 - a) * lt, math.log(c))
        return t, pos, lt, log_yc

    def f(self, t):
        a = self.a
        t, pos, lt, log_yc = self._logs(t)
        logf = math.log(a * (1 - a)) + (2 * a - 1) / (1 - a) * lt - 1.5 * log_yc
        return _out(t, np.where(pos, np.exp(logf), 0.0))

    def fprime(self, t):
        a = self.a
        t, pos, lt, log_yc = self._logs(t)
        c = (1 - a) ** 2
        e3 = (3 * a - 2) / (1 - a)
        e2 = 2 * a / (1 - a)
        with np.errstate(over="ignore"):
            first = np.exp(math.log(a * c * (2 * a - 1)) + e3 * lt - 2.5 * log_yc)
            second = np.exp(math.log(a * (1 + a)) + (e3 + e2) * lt - 2.5 * log_yc)
        return _out(t, np.where(pos, first - second, 0.0))


@dataclass(frozen=True)
class Rescaled(Nonlinearity):
    """``t -> c f(c t)``, the nonlinearity of ``u(c x) / c``."""

    base: Nonlinearity
    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise DomainError("rescale factor must be positive")

    def _arg(self, t):
        return self.c * (np.asarray(t, dtype=float) if np.ndim(t) else float(t))

    def f(self, t):
        return self.c * self.base.f(self._arg(t))

    def fprime(self, t):
        return self.c ** 2 * self.base.fprime(self._arg(t))


def eval_f(nl: Nonlinearity, t):
    return nl.f(t)


def eval_fprime(nl: Nonlinearity, t):
    return nl.fprime(t)


def rescale(nl: Nonlinearity, c: float) -> Nonlinearity:
    if not c > 0:
        raise DomainError("rescale factor must be positive")
    if isinstance(nl, Zero):
        return nl
    return Rescaled(nl, float(c))


def parse_nonlinearity(cfg: Mapping[str, str]) -> Nonlinearity:
    """Build a nonlinearity from flat ``key=value`` settings.

    Recognised: ``family=zero|constant|polynomial|counterexample`` plus
    ``lambda=``, ``coeffs=`` (comma separated, ascending) or ``a=``.
    """
    family = str(cfg.get("family", "zero")).strip().lower()
    if family == "zero":
        return Zero()
    if family == "constant":
        if "lambda" not in cfg:
            raise DomainError("constant family needs lambda=")
        return Constant(float(cfg["lambda"]))
    if family == "polynomial":
        raw = cfg.get("coeffs")
        if raw is None:
            raise DomainError("polynomial family needs coeffs=")
        coeffs: Sequence = raw if not isinstance(raw, str) else [s for s in raw.split(",") if s.strip()]
        return Polynomial(tuple(float(c) for c in coeffs))
    if family == "counterexample":
        if "a" not in cfg:
            raise DomainError("counterexample family needs a=")
        return CounterexampleF(float(cfg["a"]))
    raise DomainError(f"unknown nonlinearity family {family!r}")
