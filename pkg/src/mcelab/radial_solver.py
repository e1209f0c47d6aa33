"""Radial solutions of the prescribed mean curvature equation.

A radial solution ``u(r)`` satisfies ``(r^(n-1) w)' = -r^(n-1) f(u)`` with
the flux ``w = u' / sqrt(1 + u'^2)``. We integrate the displacement
``v = u - u0`` together with ``w``; ``u' = w / sqrt(1 - w^2)`` is recovered
afterwards and ``|w| -> 1`` marks gradient blow-up.

Slab profiles ``G(x1) = |x1|**(1-a)`` are analytic and never gridded.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from .errors import DomainError, SolverError
from .nonlinearity import Constant, Nonlinearity

__all__ = [
    "RadialProfile",
    "SlabProfile",
    "solve_radial_ivp",
    "residual_radial",
    "residual_slab",
    "cap_profile",
    "constant_profile",
    "profile_from_callables",
    "BLOWUP_MARGIN",
]

BLOWUP_MARGIN = 1e-8


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Sampled radial solution ``(r, u, u')`` in ambient dimension ``n``.

    Between nodes values come from cubic Hermite interpolation. Profiles
    built from closed forms carry the exact callables instead, which are
    then used for every off-node evaluation.
    """

    n: int
    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    ddu: Optional[np.ndarray] = None
    stop_reason: str = "complete"
    u_fn: Optional[Callable] = field(default=None, repr=False)
    du_fn: Optional[Callable] = field(default=None, repr=False)

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        u = np.asarray(self.u, dtype=float)
        du = np.asarray(self.du, dtype=float)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "du", du)
        if self.ddu is not None:
            object.__setattr__(self, "ddu", np.asarray(self.ddu, dtype=float))
        if int(self.n) != self.n or self.n < 2:
            raise DomainError("profile dimension must be an integer >= 2")
        if r.ndim != 1 or r.shape != u.shape or r.shape != du.shape or r.size < 2:
            raise DomainError("r, u, du must be 1-D arrays of equal length >= 2")
        if r[0] < 0 or np.any(np.diff(r) <= 0):
            raise DomainError("nodes must be nonnegative and strictly increasing")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(du))):
            raise DomainError("profile values must be finite")
        if r[0] == 0 and du[0] != 0 and self.du_fn is None:
            # sampled profiles are solver output; exact ones may model a cone tip
            raise DomainError("a sampled profile starting at r=0 needs u'(0) = 0")

    @property
    def r_min(self) -> float:
        return float(self.r[0])

    @property
    def r_max(self) -> float:
        return float(self.r[-1])

    @property
    def z(self) -> np.ndarray:
        return self.du ** 2

    @property
    def w(self) -> np.ndarray:
        return self.du / np.sqrt(1.0 + self.du ** 2)

    @cached_property
    def _u_spline(self):
        return CubicHermiteSpline(self.r, self.u, self.du)

    @cached_property
    def _du_spline(self):
        if self.ddu is not None:
            return CubicHermiteSpline(self.r, self.du, self.ddu)
        return CubicSpline(self.r, self.du)

    def _check_range(self, r):
        r = np.asarray(r, dtype=float)
        span = 1e-12 * max(1.0, self.r_max)
        if np.any(r < self.r_min - span) or np.any(r > self.r_max + span):
            raise DomainError(f"evaluation outside profile range [{self.r_min}, {self.r_max}]")
        return r

    def u_at(self, r):
        r = self._check_range(r)
        if self.u_fn is not None:
            return np.asarray(self.u_fn(r), dtype=float) + 0.0 * r
        return self._u_spline(r)

    def du_at(self, r):
        r = self._check_range(r)
        if self.du_fn is not None:
            return np.asarray(self.du_fn(r), dtype=float) + 0.0 * r
        return self._du_spline(r)

    def z_at(self, r):
        return self.du_at(r) ** 2

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["r", "u", "du"])
        for row in zip(self.r, self.u, self.du):
            writer.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, n: int) -> "RadialProfile":
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames is None or [h.strip() for h in reader.fieldnames] != ["r", "u", "du"]:
            raise DomainError("profile CSV must have header r,u,du")
        rows = [(float(row["r"]), float(row["u"]), float(row["du"])) for row in reader]
        if not rows:
            raise DomainError("profile CSV has no rows")
        r, u, du = (np.array(c) for c in zip(*rows))
        return cls(n=n, r=r, u=u, du=du)


def profile_from_callables(n: int, r_nodes, u_fn: Callable, du_fn: Callable) -> RadialProfile:
    """Profile whose off-node evaluations use the given exact functions."""
    r = np.asarray(r_nodes, dtype=float)
    u = np.asarray(u_fn(r), dtype=float) + 0.0 * r
    du = np.asarray(du_fn(r), dtype=float) + 0.0 * r
    return RadialProfile(n=n, r=r, u=u, du=du, u_fn=u_fn, du_fn=du_fn)


def cap_profile(n: int, lam: float, u0: float, r_nodes) -> RadialProfile:
    """Exact spherical cap solving the equation with ``f = lam``.

    ``w = -lam r / n`` so ``u = u0 + (n/lam)(sqrt(1 - (lam r/n)^2) - 1)``;
    defined for ``r < n / lam``.
    """
    k = lam / n

    def u_fn(r):
        return u0 + (np.sqrt(1.0 - (k * r) ** 2) - 1.0) / k

    def du_fn(r):
        return -k * r / np.sqrt(1.0 - (k * r) ** 2)

    r = np.asarray(r_nodes, dtype=float)
    if np.any(k * r >= 1):
        raise DomainError("cap profile only exists for r < n / lam")
    return profile_from_callables(n, r, u_fn, du_fn)


def constant_profile(n: int, value: float, r_nodes) -> RadialProfile:
    return profile_from_callables(n, r_nodes, lambda r: np.full_like(r, value, dtype=float),
                                  lambda r: np.zeros_like(r, dtype=float))


def _center_series(nl: Nonlinearity, n: int, u0: float, h: float):
    """Displacement, flux and u'' after one series step of size ``h``."""
    f0 = float(nl.f(u0))
    f1 = float(nl.fprime(u0))
    c3 = f0 * f1 / (2.0 * n * (n + 2))
    w = -f0 * h / n + c3 * h ** 3
    v = -f0 * h ** 2 / (2.0 * n) + (c3 - f0 ** 3 / (2.0 * n ** 3)) * h ** 4 / 4.0
    return v, w, f0


def solve_radial_ivp(nl: Nonlinearity, n: int, u0: float, R: float, tol: float = 1e-10,
                     max_step: Optional[float] = None) -> RadialProfile:
    """Integrate the radial equation from the symmetry center to ``R``.

    A series step of size ``min(1e-3, R/1000)`` leaves the coordinate
    singularity at ``r = 0``; an 8th-order Dormand-Prince pair takes over.
    If ``|w|`` reaches ``1 - 1e-8`` the partial profile is returned with
    ``stop_reason == "gradient_blowup"``.

    Raises
    ------
    SolverError
        The integrator failed (step-size underflow).
    """
    if int(n) != n or n < 2:
        raise DomainError("n must be an integer >= 2")
    if not (R > 0 and tol > 0):
        raise DomainError("R and tol must be positive")
    h0 = min(1e-3, R / 1000.0)
    v0, w0, f0 = _center_series(nl, n, u0, h0)
    if max_step is None:
        max_step = R / 512.0

    def rhs(r, y):
        v, w = y
        return [w / math.sqrt(max(1.0 - w * w, 1e-300)), -float(nl.f(u0 + v)) - (n - 1) * w / r]

    def blowup(r, y):
        return (1.0 - BLOWUP_MARGIN) - abs(y[1])

    blowup.terminal = True
    blowup.direction = -1

    sol = solve_ivp(rhs, (h0, R), [v0, w0], method="DOP853", rtol=tol, atol=tol,
                    events=blowup, max_step=max_step)
    if sol.status == -1:
        raise SolverError(f"radial integration failed: {sol.message}")
    stop = "gradient_blowup" if sol.status == 1 else "complete"

    r = np.concatenate([[0.0], sol.t])
    v = np.concatenate([[0.0], sol.y[0]])
    w = np.concatenate([[0.0], sol.y[1]])
    if stop == "gradient_blowup":
        # keep only nodes strictly inside the flux bound
        keep = np.abs(w) < 1.0 - BLOWUP_MARGIN / 2
        r, v, w = r[keep], v[keep], w[keep]
    du = w / np.sqrt(1.0 - w ** 2)
    dw = np.empty_like(w)
    dw[0] = -f0 / n
    dw[1:] = -nl.f(u0 + v[1:]) - (n - 1) * w[1:] / r[1:]
    ddu = dw / (1.0 - w ** 2) ** 1.5
    return RadialProfile(n=n, r=r, u=u0 + v, du=du, ddu=ddu, stop_reason=stop)


def residual_radial(p: RadialProfile, nl: Nonlinearity) -> float:
    """Max over interior nodes of ``|(r^(n-1) w)' + r^(n-1) f(u)| / r^(n-1)``.

    The weighted derivative is expanded as ``w' + (n-1) w / r`` and ``w'``
    is taken by second-order central differences on the (possibly
    nonuniform) node grid, which keeps the check exact for linear flux.
    """
    if p.r.size < 5:
        raise DomainError("residual needs at least 5 nodes")
    w = p.w
    dw = np.gradient(w, p.r, edge_order=2)
    idx = np.arange(1, p.r.size - 1)
    idx = idx[p.r[idx] > 0]
    res = dw[idx] + (p.n - 1) * w[idx] / p.r[idx] + nl.f(p.u[idx])
    return float(np.max(np.abs(res)))


@dataclass(frozen=True)
class SlabProfile:
    """Slab profile ``G(x1) = |x1|**(1-a)`` viewed in dimension ``n``."""

    n: int
    a: float
    half_width: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError("n must be an integer >= 2")
        if not 0.5 < self.a < 1.0:
            raise DomainError("slab profile needs 1/2 < a < 1")
        if not self.half_width > 0:
            raise DomainError("half_width must be positive")

    @property
    def _c(self):
        return (1.0 - self.a) ** 2

    def G(self, x):
        return np.abs(x) ** (1.0 - self.a)

    def dG(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return (1.0 - self.a) * np.sign(x) * np.abs(x) ** (-self.a)

    def grad_abs(self, x):
        with np.errstate(divide="ignore"):
            return (1.0 - self.a) * np.abs(x) ** (-self.a)

    def z(self, x):
        return self.grad_abs(x) ** 2

    def weight(self, x):
        """``(1 + z)^(-3/2) = |x|^(3a) / (|x|^(2a) + (1-a)^2)^(3/2)``, zero at 0."""
        ax = np.abs(x)
        return ax ** (3 * self.a) / (ax ** (2 * self.a) + self._c) ** 1.5

    def flux(self, x):
        """``G' / sqrt(1 + G'^2)``, bounded and odd."""
        x = np.asarray(x, dtype=float)
        return (1.0 - self.a) * np.sign(x) / np.sqrt(np.abs(x) ** (2 * self.a) + self._c)

    def dflux(self, x):
        """Exact ``d/dx1`` of :meth:`flux` away from the plane ``x1 = 0``."""
        ax = np.abs(x)
        a = self.a
        return -a * (1 - a) * ax ** (2 * a - 1) / (ax ** (2 * a) + self._c) ** 1.5


def residual_slab(s: SlabProfile, nl: Nonlinearity, x1: float, method: str = "analytic") -> float:
    """``|d/dx1 (G'/sqrt(1+G'^2)) + f(G)|`` at ``x1 != 0``.

    ``method="numeric"`` replaces the exact derivative of the flux by a
    fourth-order central difference.
    """
    if x1 == 0:
        raise DomainError("the slab profile is singular on x1 = 0")
    if method == "analytic":
        div = float(s.dflux(x1))
    elif method == "numeric":
        h = 1e-3 * abs(x1)
        fl = s.flux
        div = float((-fl(x1 + 2 * h) + 8 * fl(x1 + h) - 8 * fl(x1 - h) + fl(x1 - 2 * h)) / (12 * h))
    else:
        raise DomainError(f"unknown method {method!r}")
    return abs(div + float(nl.f(float(s.G(x1)))))
