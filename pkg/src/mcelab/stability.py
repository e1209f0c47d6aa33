"""Second variation and discrete stability tests.

For a radial profile the second variation on radial test functions is

    Q(xi) = omega_{n-1} int [ xi'^2 / (1+z)^(3/2) - f'(u) xi^2 ] r^(n-1) dr,

because ``|grad xi|^2/sqrt(1+z) - (grad u . grad xi)^2/(1+z)^(3/2)``
collapses to ``xi'^2 (1+z-z)/(1+z)^(3/2)`` when both gradients are radial.
The slab version drops the radial weight and uses ``z = G'(x1)^2``.

Discretisation: P1 elements on a uniform mesh, stiffness weight sampled
at element midpoints, consistent mass and potential matrices from a
4-point Gauss rule. The smallest eigenvalue of ``A x = mu B x`` is
bracketed by Sylvester inertia (banded Cholesky of ``A - sigma B``) and
its eigenvector found by shifted inverse iteration.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import LinAlgError, cho_solve_banded, cholesky_banded

from .errors import DomainError, EigenSolveError
from .nonlinearity import CounterexampleF, Nonlinearity
from .numerics import Interval, integrate, surface_area
from .radial_solver import RadialProfile, SlabProfile

__all__ = [
    "StabilityReport",
    "Pencil",
    "quadratic_form_radial",
    "radial_pencil",
    "slab_pencil",
    "smallest_eigenpair",
    "min_eigenvalue_radial",
    "min_eigenvalue_slab",
    "TOL_EIG",
]

TOL_EIG = 1e-6

_GL_X, _GL_W = np.polynomial.legendre.leggauss(4)


@dataclass
class StabilityReport:
    min_eigenvalue: float
    mesh_size: int
    domain: Interval
    regime: str  # "radial" or "slab_reduced"
    tol_eig: float = TOL_EIG
    nodes: np.ndarray = field(default=None, repr=False)
    eigenvector: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.mesh_size < 8:
            raise DomainError("mesh_size must be >= 8")
        if not math.isfinite(self.min_eigenvalue):
            raise EigenSolveError("non-finite eigenvalue")

    @property
    def stable(self) -> bool:
        """Discrete stability within the report's regime only."""
        return self.min_eigenvalue >= -self.tol_eig

    @property
    def label(self) -> str:
        kind = "radially" if self.regime == "radial" else "slab-reduced"
        return f"{kind} {'stable' if self.stable else 'unstable'}"

    def to_dict(self) -> dict:
        return {
            "min_eigenvalue": self.min_eigenvalue,
            "mesh_size": self.mesh_size,
            "domain": [self.domain.lo, self.domain.hi],
            "regime": self.regime,
            "label": self.label,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def quadratic_form_radial(p: RadialProfile, nl: Nonlinearity, xi: Callable, dxi: Callable,
                          support: Interval, tol: float = 1e-10) -> float:
    """Second variation ``Q(xi)`` for a radial test function supported in ``support``."""
    if not isinstance(support, Interval):
        support = Interval(*support)
    if support.lo < p.r_min or support.hi > p.r_max:
        raise DomainError("test-function support must lie inside the profile range")
    n = p.n

    def integrand(r):
        z = p.z_at(r)
        return (dxi(r) ** 2 / (1.0 + z) ** 1.5 - nl.fprime(p.u_at(r)) * xi(r) ** 2) * r ** (n - 1)

    return surface_area(n) * integrate(integrand, support, tol=tol, points=(0.0,))


@dataclass
class Pencil:
    """Tridiagonal pencil ``A = K - P`` and ``B`` on the interior nodes.

    Matrices are kept as (diagonal, off-diagonal) pairs.
    """

    nodes: np.ndarray
    interior: np.ndarray  # indices of free nodes
    K: tuple
    P: tuple
    B: tuple
    potential_bound: float  # max f' over the quadrature points (>= 0)

    @property
    def A(self) -> tuple:
        return (self.K[0] - self.P[0], self.K[1] - self.P[1])

    def matvec(self, mat, x):
        d, e = mat
        y = d * x
        y[:-1] += e * x[1:]
        y[1:] += e * x[:-1]
        return y

    def rayleigh(self, x) -> float:
        return float(x @ self.matvec(self.A, x) / (x @ self.matvec(self.B, x)))


def _assemble(nodes, stiff_weight, mass_weight, pot_weight, free_left, free_right):
    m = nodes.size - 1
    h = np.diff(nodes)
    mid = 0.5 * (nodes[:-1] + nodes[1:])
    k = stiff_weight(mid) / h

    # quadrature points per element: shape (m, 4)
    xq = mid[:, None] + 0.5 * h[:, None] * _GL_X[None, :]
    wq = 0.5 * h[:, None] * _GL_W[None, :]
    phi_l = 0.5 * (1.0 - _GL_X)[None, :]
    phi_r = 0.5 * (1.0 + _GL_X)[None, :]
    mw = mass_weight(xq) * wq
    pw = pot_weight(xq) * mw

    def local(weights):
        return ((weights * phi_l * phi_l).sum(1), (weights * phi_l * phi_r).sum(1),
                (weights * phi_r * phi_r).sum(1))

    def global_tri(ll, lr, rr):
        d = np.zeros(m + 1)
        d[:-1] += ll
        d[1:] += rr
        return d, lr.copy()

    Kd, Ke = global_tri(k, -k, k)
    Bd, Be = global_tri(*local(mw))
    Pd, Pe = global_tri(*local(pw))

    lo = 0 if free_left else 1
    hi = m + 1 if free_right else m
    idx = np.arange(lo, hi)

    def cut(d, e):
        return d[lo:hi].copy(), e[lo:hi - 1].copy()

    bound = max(0.0, float(np.max(pot_weight(xq))))
    return Pencil(nodes, idx, cut(Kd, Ke), cut(Pd, Pe), cut(Bd, Be), bound)


def radial_pencil(p: RadialProfile, nl: Nonlinearity, domain: Interval, m: int) -> Pencil:
    if not isinstance(domain, Interval):
        domain = Interval(*domain)
    if m < 8:
        raise DomainError("mesh size must be >= 8")
    if domain.lo < p.r_min or domain.hi > p.r_max:
        raise DomainError("domain must lie inside the profile range")
    n = p.n
    nodes = np.linspace(domain.lo, domain.hi, m + 1)
    return _assemble(
        nodes,
        stiff_weight=lambda r: r ** (n - 1) / (1.0 + p.z_at(r)) ** 1.5,
        mass_weight=lambda r: r ** (n - 1),
        pot_weight=lambda r: nl.fprime(p.u_at(r)),
        # the symmetry center is not a boundary: no condition there
        free_left=domain.lo == 0.0,
        free_right=False,
    )


def slab_pencil(s: SlabProfile, nl: Nonlinearity, half_width: float, m: int) -> Pencil:
    if m < 8:
        raise DomainError("mesh size must be >= 8")
    nodes = np.linspace(-half_width, half_width, m + 1)
    return _assemble(
        nodes,
        stiff_weight=s.weight,
        mass_weight=lambda x: np.ones_like(x),
        pot_weight=lambda x: nl.fprime(s.G(x)),
        free_left=False,
        free_right=False,
    )


def _banded(d, e):
    ab = np.zeros((2, d.size))
    ab[0, 1:] = e
    ab[1, :] = d
    return ab


def _factor(pencil, sigma):
    A = pencil.A
    d = A[0] - sigma * pencil.B[0]
    e = A[1] - sigma * pencil.B[1]
    try:
        return cholesky_banded(_banded(d, e), lower=False)
    except LinAlgError:
        return None


def smallest_eigenpair(pencil: Pencil, tol: float = 1e-12, max_iter: int = 200):
    """Smallest eigenvalue of the pencil and a B-normalised eigenvector.

    Raises
    ------
    EigenSolveError
        If the inertia bracket cannot be established or inverse iteration
        does not settle inside it.
    """
    size = pencil.B[0].size
    if size < 1:
        raise EigenSolveError("pencil has no free nodes")
    lo = -pencil.potential_bound - 1.0
    for _ in range(60):
        if _factor(pencil, lo) is not None:
            break
        lo = 2.0 * lo - 1.0
    else:
        raise EigenSolveError("no positive-definite shift found below the spectrum")
    x = np.ones(size)
    hi = pencil.rayleigh(x)
    if hi < lo:
        raise EigenSolveError("Rayleigh bound below inertia bound")

    for _ in range(max_iter):
        if hi - lo <= tol * max(1.0, abs(lo), abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        if _factor(pencil, mid) is not None:
            lo = mid
        else:
            hi = mid
    else:
        raise EigenSolveError(f"bisection did not converge: [{lo}, {hi}]")

    width = max(hi - lo, 1e-14 * max(1.0, abs(lo)))
    shift = lo - width
    chol = _factor(pencil, shift)
    if chol is None:
        raise EigenSolveError("shift below bracket is not positive definite")
    x = np.ones(size)
    mu = np.nan
    for _ in range(50):
        y = cho_solve_banded((chol, False), pencil.matvec(pencil.B, x))
        x = y / math.sqrt(y @ pencil.matvec(pencil.B, y))
        new = pencil.rayleigh(x)
        if abs(new - mu) <= tol * max(1.0, abs(new)):
            mu = new
            break
        mu = new
    slack = 1e3 * width + 1e-10 * max(1.0, abs(mu))
    if not (lo - slack <= mu <= hi + slack):
        raise EigenSolveError(f"inverse iteration left the bracket: {mu} not in [{lo}, {hi}]")
    if x[np.argmax(np.abs(x))] < 0:
        x = -x
    return mu, x


def _report(pencil, domain, m, regime):
    mu, x = smallest_eigenpair(pencil)
    full = np.zeros(pencil.nodes.size)
    full[pencil.interior] = x
    return StabilityReport(min_eigenvalue=float(mu), mesh_size=m, domain=domain, regime=regime,
                           nodes=pencil.nodes, eigenvector=full)


def min_eigenvalue_radial(p: RadialProfile, nl: Nonlinearity, domain, m: int = 1000) -> StabilityReport:
    """Smallest eigenvalue of the radial second variation on ``domain``.

    Dirichlet conditions are imposed at ``domain.hi`` and at ``domain.lo``
    unless it is the symmetry center ``r = 0``. A negative value below
    ``-TOL_EIG`` certifies instability against radial perturbations; a
    nonnegative one only certifies radial stability.
    """
    if not isinstance(domain, Interval):
        domain = Interval(*domain)
    return _report(radial_pencil(p, nl, domain, m), domain, m, "radial")


def min_eigenvalue_slab(s: SlabProfile, nl: Nonlinearity, half_width: float, m: int = 2000) -> StabilityReport:
    """Smallest eigenvalue of the reduced slab form on ``(-half_width, half_width)``.

    The potential ``f'(G(x1))`` behaves like ``|x1|^(3a-2)`` and is only
    bounded for ``a >= 2/3``; below that the direct check is refused and
    the weighted Hardy chain must be used instead.
    """
    from .inequality_lab import compute_r0, lambda_star

    if s.a < 2.0 / 3.0:
        raise DomainError(
            "direct slab eigenvalue check needs a >= 2/3 (unbounded potential); "
            "use the Hardy-chain verification in inequality_lab instead"
        )
    if isinstance(nl, CounterexampleF) and nl.a != s.a:
        raise DomainError("nonlinearity parameter does not match the slab profile")
    _, r0 = compute_r0(s.a, lambda_star(s.a))
    if half_width > r0 * (1 + 1e-12):
        raise DomainError(f"half_width {half_width} exceeds r0 = {r0}")
    domain = Interval(-half_width, half_width)
    return _report(slab_pencil(s, nl, half_width, m), domain, m, "slab_reduced")
