"""Quadrature, radial ball integrals and log-log power-law fits.

The integrator is an adaptive 7/15-point Gauss-Kronrod scheme. Callers
declare the abscissae where the integrand has an integrable power
singularity; the interval is split there and every subinterval touching
such a point is refined geometrically toward it, so weights like
``|t|**sigma`` (sigma > -1) are handled by one mechanism.

Integrands are called with a 1-D array of nodes and may return either an
array of the same length or a stack of shape ``(k, len(t))``; in the
latter case the result is a length-``k`` array and the tolerance applies
to each component.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, QuadratureError

__all__ = [
    "Interval",
    "PowerLawFit",
    "integrate",
    "surface_area",
    "sphere_area",
    "ball_volume",
    "ball_integral_radial",
    "fit_power_law",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-10

# Kronrod abscissae (positive half, descending) and weights; the Gauss
# 7-point rule uses every second abscissa.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# full 15-node layout on [-1, 1]
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(15)
_GAUSS_W[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])

_EPS = np.finfo(float).eps
_GRADE = 0.125  # split ratio toward a declared singular endpoint


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise DomainError(f"interval endpoints must be finite: {self}")
        if not self.lo < self.hi:
            raise DomainError(f"interval needs lo < hi: {self}")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares fit of ``log y = slope * log R + log_coeff``."""

    slope: float
    log_coeff: float
    max_residual: float

    def predict(self, R):
        return np.exp(self.log_coeff) * np.asarray(R, dtype=float) ** self.slope


def _evaluate(g, t):
    y = np.asarray(g(t), dtype=float)
    if y.ndim == 0:
        return np.full(t.shape, float(y))
    if y.shape[-1] != t.shape[0]:
        raise DomainError(f"integrand returned shape {y.shape} for {t.shape[0]} nodes")
    return y


def _gk15(g, lo, hi):
    """Kronrod estimate and QUADPACK-style error estimate on [lo, hi]."""
    half = 0.5 * (hi - lo)
    center = 0.5 * (hi + lo)
    y = _evaluate(g, center + half * _NODES)
    if not np.all(np.isfinite(y)):
        raise QuadratureError(f"non-finite integrand value on [{lo}, {hi}]", np.nan, np.inf)
    resk = y @ _KRONROD_W
    resg = y @ _GAUSS_W
    resabs = np.abs(y) @ _KRONROD_W
    mean = resk * 0.5
    resasc = np.abs(y - mean[..., None]) @ _KRONROD_W
    err = np.abs(resk - resg) * abs(half)
    resasc = resasc * abs(half)
    resabs = resabs * abs(half)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc != 0) & (err != 0), scaled, err)
    err = np.maximum(err, 50 * _EPS * resabs)
    return resk * half, err


def _graded_breaks(lo, hi, singular):
    """Break points: declared singular abscissae plus geometric grading."""
    inside = sorted({float(p) for p in singular if lo <= p <= hi})
    cuts = sorted({lo, hi, *inside})
    pts = set(cuts)
    for a, b in zip(cuts[:-1], cuts[1:]):
        for s, other in ((a, b), (b, a)):
            if s in inside:
                for k in range(1, 4):
                    pts.add(s + (other - s) * _GRADE ** k)
    return sorted(pts)


def integrate(
    g: Callable,
    iv,
    tol: float = DEFAULT_TOL,
    points: Iterable[float] = (),
    limit: int = 4000,
    full_output: bool = False,
):
    """Adaptive integral of ``g`` over ``iv`` (an Interval or ``(lo, hi)``).

    Parameters
    ----------
    g : callable
        Vectorised integrand, see module docstring.
    iv : Interval or tuple
    tol : float
        Target ``|Q - I| <= tol * (1 + |Q|)`` per component.
    points : iterable of float
        Abscissae where ``g`` may be singular or non-smooth.
    limit : int
        Maximum number of subintervals.
    full_output : bool
        Also return the summed error bound.

    Raises
    ------
    QuadratureError
        Budget exhausted; carries the best estimate and its bound.
    """
    if not isinstance(iv, Interval):
        iv = Interval(float(iv[0]), float(iv[1]))
    if not tol > 0:
        raise DomainError("tol must be positive")
    singular = {float(p) for p in points if iv.lo <= p <= iv.hi}
    breaks = _graded_breaks(iv.lo, iv.hi, singular)

    heap = []
    final_val = 0.0
    final_err = 0.0
    total_val = 0.0
    total_err = 0.0
    counter = 0
    for a, b in zip(breaks[:-1], breaks[1:]):
        val, err = _gk15(g, a, b)
        heapq.heappush(heap, (-float(np.max(err)), counter, a, b, val, err))
        counter += 1
        total_val = total_val + val
        total_err = total_err + err

    while True:
        if np.all(total_err <= tol * (1.0 + np.abs(total_val))):
            break
        if not heap:
            break
        if len(heap) >= limit:
            raise QuadratureError("subdivision limit reached", total_val, total_err)
        _, _, a, b, val, err = heapq.heappop(heap)
        total_val = total_val - val
        total_err = total_err - err
        if a in singular:
            mid = a + (b - a) * _GRADE
        elif b in singular:
            mid = b - (b - a) * _GRADE
        else:
            mid = 0.5 * (a + b)
        if not a < mid < b:
            # cannot be split further in double precision
            final_val = final_val + val
            final_err = final_err + err
            total_val = total_val + val
            total_err = total_err + err
            continue
        for lo, hi in ((a, mid), (mid, b)):
            try:
                v, e = _gk15(g, lo, hi)
            except QuadratureError as exc:
                raise QuadratureError(str(exc), total_val + val, total_err + err) from None
            heapq.heappush(heap, (-float(np.max(e)), counter, lo, hi, v, e))
            counter += 1
            total_val = total_val + v
            total_err = total_err + e

    # re-sum to shed cancellation from the running updates
    total_val = sum((item[4] for item in heap), final_val)
    total_err = sum((item[5] for item in heap), final_err)
    if not np.all(total_err <= tol * (1.0 + np.abs(total_val))):
        raise QuadratureError("tolerance not reached", total_val, total_err)
    if np.ndim(total_val) == 0:
        total_val = float(total_val)
        total_err = float(total_err)
    return (total_val, total_err) if full_output else total_val


def sphere_area(k: int) -> float:
    """Area of the unit sphere S^k in R^(k+1); ``sphere_area(0) == 2``."""
    if k < 0:
        raise DomainError("sphere dimension must be >= 0")
    m = (k + 1) / 2
    return float(2.0 * math.exp(m * math.log(math.pi) - gammaln(m)))


def surface_area(n: int) -> float:
    """Surface area of the unit sphere in R^n, ``2 pi^(n/2) / Gamma(n/2)``."""
    if n < 2:
        raise DomainError("surface_area needs n >= 2")
    return sphere_area(n - 1)


def ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n (``n >= 1``)."""
    if n < 1:
        raise DomainError("ball_volume needs n >= 1")
    return float(math.exp(0.5 * n * math.log(math.pi) - gammaln(0.5 * n + 1)))


def ball_integral_radial(g: Callable, n: int, rho: float, tol: float = DEFAULT_TOL,
                         points: Sequence[float] = ()) -> float:
    """``omega_{n-1} * int_0^rho g(r) r^(n-1) dr`` for a radial integrand."""
    if not rho > 0:
        raise DomainError("rho must be positive")
    w = surface_area(n)

    def integrand(r):
        return _evaluate(g, r) * r ** (n - 1)

    return w * integrate(integrand, (0.0, rho), tol=tol, points=(0.0, *points))


def fit_power_law(samples) -> PowerLawFit:
    """Fit ``y = exp(log_coeff) * R**slope`` to ``(R, y)`` pairs in log space."""
    data = np.asarray(list(samples), dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise DomainError("samples must be (R, y) pairs")
    if data.shape[0] < 3:
        raise DomainError("need at least 3 samples")
    R, y = data[:, 0], data[:, 1]
    if np.any(R <= 0) or np.any(y <= 0) or not np.all(np.isfinite(data)):
        raise DomainError("power-law fit needs positive finite R and y")
    if np.unique(R).size != R.size:
        raise DomainError("R values must be distinct")
    lx, ly = np.log(R), np.log(y)
    slope, log_coeff = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + log_coeff)
    return PowerLawFit(float(slope), float(log_coeff), float(np.max(np.abs(resid))))
