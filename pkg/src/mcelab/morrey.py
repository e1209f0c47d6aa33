"""Morrey constants of radial and slab gradient magnitudes.

The Morrey objective of a density ``g`` at a center ``x0`` and radius
``rho`` is ``rho^(-n(1-1/p)) * int_{B_rho(x0)} g``. For radial densities
the ball mass reduces to a 1-D integral against the area of the sphere
``|x| = r`` lying inside ``B_rho(x0)``; for slab densities depending on
``x1`` alone it reduces to an integral against cross-sectional
``(n-1)``-ball volumes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import beta as beta_fn
from scipy.special import betainc

from .errors import DomainError
from .numerics import (
    DEFAULT_TOL,
    PowerLawFit,
    ball_integral_radial,
    ball_volume,
    fit_power_law,
    integrate,
    sphere_area,
    surface_area,
)
from .radial_solver import RadialProfile, SlabProfile

__all__ = [
    "RadialDensity",
    "SlabDensity",
    "MorreyReport",
    "RemovabilityReport",
    "cap_area",
    "ball_mass_radial_offcenter",
    "ball_mass_slab",
    "morrey_constant",
    "decay_exponent_at_origin",
    "removable_singularity_check",
]


@dataclass(frozen=True)
class RadialDensity:
    """``g(|x|)`` on R^n, or on the ball ``|x| < radius`` when given."""

    n: int
    g: Callable
    radius: Optional[float] = None
    points: tuple = ()

    @classmethod
    def gradient_of(cls, p: RadialProfile) -> "RadialDensity":
        if p.r_min > 0:
            raise DomainError("gradient density needs a profile starting at r = 0")
        return cls(p.n, lambda r: np.abs(p.du_at(r)), radius=p.r_max)


@dataclass(frozen=True)
class SlabDensity:
    """``g(x1)`` on R^n; balls are never intersected with the domain."""

    n: int
    g: Callable
    half_width: float = 1.0
    points: tuple = (0.0,)

    @classmethod
    def gradient_of(cls, s: SlabProfile) -> "SlabDensity":
        return cls(s.n, s.grad_abs, half_width=s.half_width)


def _sin_power_integral(theta, k):
    """``int_0^theta sin^k`` for ``theta`` in ``[0, pi]`` (vectorised)."""
    theta = np.asarray(theta, dtype=float)
    half = 0.5 * beta_fn(0.5, 0.5 * (k + 1))
    low = np.minimum(theta, math.pi - theta)
    part = half * betainc(0.5 * (k + 1), 0.5, np.sin(low) ** 2)
    return np.where(theta <= 0.5 * math.pi, part, 2.0 * half - part)


def cap_area(r, s: float, rho: float, n: int):
    """Area of ``{|x| = r} ∩ B_rho(x0)`` with ``|x0| = s``, ``n >= 2``."""
    if n < 2:
        raise DomainError("cap_area needs n >= 2")
    if not rho > 0 or s < 0:
        raise DomainError("need rho > 0 and s >= 0")
    r = np.asarray(r, dtype=float)
    full = surface_area(n) * r ** (n - 1)
    out = np.zeros_like(r)
    inside = r <= rho - s
    out = np.where(inside, full, out)
    partial = (r > abs(rho - s)) & (r < rho + s)
    if s > 0 and np.any(partial):
        rp = np.where(partial, r, 1.0)
        cos_t = np.clip((rp * rp + s * s - rho * rho) / (2.0 * rp * s), -1.0, 1.0)
        area = sphere_area(n - 2) * rp ** (n - 1) * _sin_power_integral(np.arccos(cos_t), n - 2)
        out = np.where(partial, area, out)
    return float(out) if out.ndim == 0 else out


def ball_mass_radial_offcenter(g: Callable, n: int, s: float, rho: float, tol: float = DEFAULT_TOL,
                               radius: Optional[float] = None, points: Sequence[float] = ()) -> float:
    """``int_{B_rho(x0) ∩ B_radius} g(|x|) dx`` with ``|x0| = s``.

    ``radius=None`` integrates over the whole ball ``B_rho(x0)``. Areas are
    normalised by ``rho^n`` so the tolerance stays relative for tiny balls.
    """
    if not rho > 0 or s < 0:
        raise DomainError("need rho > 0 and s >= 0")
    lo = max(0.0, s - rho)
    hi = s + rho if radius is None else min(s + rho, radius)
    if hi <= lo:
        return 0.0
    sc = s / rho

    def integrand(r):
        return g(r) * cap_area(np.asarray(r) / rho, sc, 1.0, n) / rho

    kinks = (0.0, abs(rho - s), rho + s, *points)
    return rho ** n * integrate(integrand, (lo, hi), tol=tol, points=kinks)


def ball_mass_slab(g: Callable, n: int, s1: float, rho: float, tol: float = DEFAULT_TOL,
                   points: Sequence[float] = (0.0,)) -> float:
    """``int_{B_rho(x0)} g(x1) dx`` with ``x0 = (s1, 0, ..., 0)``.

    Cross sections are ``(n-1)``-balls of radius ``sqrt(rho^2 - (x1-s1)^2)``,
    normalised by ``rho^n`` so the tolerance stays relative for tiny balls.
    """
    if not rho > 0:
        raise DomainError("rho must be positive")
    half = 0.5 * (n - 1)

    def integrand(t):
        tau = (np.asarray(t) - s1) / rho
        return g(t) * np.maximum(1.0 - tau * tau, 0.0) ** half / rho

    bounds = (s1 - rho, s1 + rho)
    return rho ** n * ball_volume(n - 1) * integrate(integrand, bounds, tol=tol, points=(*bounds, *points))


@dataclass
class MorreyReport:
    p: float
    K: float
    worst_center: float
    worst_radius: float
    scaling_slope: float
    growth_rate: float  # -(slope of the objective) over the smallest radii at the worst center
    samples: list = field(default_factory=list, repr=False)  # (s, rho, mass, objective)

    def __post_init__(self):
        if not self.K >= 0:
            raise DomainError("Morrey constant must be nonnegative")
        if not math.isfinite(self.scaling_slope):
            raise DomainError("scaling slope must be finite")

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "K": self.K,
            "worst_center": self.worst_center,
            "worst_radius": self.worst_radius,
            "scaling_slope": self.scaling_slope,
            "growth_rate": self.growth_rate,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["s", "rho", "mass", "objective"])
        for row in self.samples:
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()


def _mass_fn(density):
    if isinstance(density, RadialDensity):
        return lambda s, rho: ball_mass_radial_offcenter(
            density.g, density.n, s, rho, radius=density.radius, points=density.points)
    if isinstance(density, SlabDensity):
        return lambda s, rho: ball_mass_slab(density.g, density.n, s, rho, points=density.points)
    raise DomainError(f"unsupported density {type(density).__name__}")


def _as_density(profile):
    if isinstance(profile, (RadialDensity, SlabDensity)):
        return profile
    if isinstance(profile, RadialProfile):
        return RadialDensity.gradient_of(profile)
    if isinstance(profile, SlabProfile):
        return SlabDensity.gradient_of(profile)
    raise DomainError(f"unsupported profile {type(profile).__name__}")


def morrey_constant(profile, p: float, diam: Optional[float] = None, center_grid: int = 33,
                    radius_grid: int = 13) -> MorreyReport:
    """Sampled sup of the Morrey objective over centers and radii ``diam * 2^-k``.

    Centers run over ``[0, diam/2]`` (radial offset or ``x1`` offset) and
    always include the symmetry locus ``0``.
    """
    if not p >= 1:
        raise DomainError("p must be >= 1")
    if center_grid < 8 or radius_grid < 8:
        raise DomainError("grids need at least 8 points")
    density = _as_density(profile)
    n = density.n
    if diam is None:
        if isinstance(density, RadialDensity):
            if density.radius is None:
                raise DomainError("diam is required for a density on all of R^n")
            diam = 2.0 * density.radius
        else:
            diam = 2.0 * density.half_width
    if not diam > 0:
        raise DomainError("diam must be positive")
    mass = _mass_fn(density)
    expo = n * (1.0 - 1.0 / p)
    centers = np.linspace(0.0, 0.5 * diam, center_grid)
    radii = diam * 0.5 ** np.arange(radius_grid)

    samples = []
    best = (-1.0, 0.0, radii[0])
    for s in centers:
        for rho in radii:
            m = mass(float(s), float(rho))
            obj = rho ** (-expo) * m
            samples.append((float(s), float(rho), m, obj))
            if obj > best[0]:
                best = (obj, float(s), float(rho))

    K, s_star, rho_star = best
    at = [(rho, m) for s, rho, m, _ in samples if s == s_star and m > 0]
    if len(at) >= 3:
        slope = fit_power_law(at).slope
        tail = sorted(at)[: min(6, len(at))]
        growth = -fit_power_law([(rho, rho ** (-expo) * m) for rho, m in tail]).slope
    else:
        slope, growth = float("nan"), float("nan")
    if not math.isfinite(slope):
        # degenerate (identically zero) density: no scaling information
        slope, growth = 0.0, 0.0
    return MorreyReport(p=float(p), K=float(K), worst_center=s_star, worst_radius=rho_star,
                        scaling_slope=float(slope), growth_rate=float(growth), samples=samples)


def decay_exponent_at_origin(p: RadialProfile, rho_list: Sequence[float]) -> PowerLawFit:
    """Fit ``log int_{B_rho}|grad u|`` against ``log rho``."""
    rho_list = [float(r) for r in rho_list]
    if not rho_list:
        raise DomainError("rho_list is empty")
    if p.r_min > 0:
        raise DomainError("profile must start at the origin")
    if max(rho_list) > p.r_max:
        raise DomainError("rho beyond the profile range")
    masses = [ball_integral_radial(lambda r: np.abs(p.du_at(r)), p.n, rho) for rho in rho_list]
    if any(m <= 0 for m in masses):
        raise DomainError("vanishing ball mass: log-log fit undefined")
    return fit_power_law(zip(rho_list, masses))


@dataclass
class RemovabilityReport:
    holds: bool
    limit: float
    max_violation: float  # max_k (|u(r_{k+1}) - u(r_k)| - C 2^{-k alpha}); <= 0 when the chain holds
    constant: float
    k_max: int
    differences: np.ndarray = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {"holds": self.holds, "limit": self.limit, "max_violation": self.max_violation,
                "constant": self.constant, "k_max": self.k_max}


def removable_singularity_check(p: RadialProfile, alpha: float, K_fit: float,
                                k_max: Optional[int] = None) -> RemovabilityReport:
    """Dyadic Cauchy-chain test ``|u(r_{k+1}) - u(r_k)| <= C 2^{-k alpha}``, ``r_k = 2^-k``.

    The chain constant is ``C = K_fit 2^(n-1) / omega_{n-1}`` where
    ``K_fit`` bounds ``int_{B_rho}|grad u| <= K_fit rho^(n-1+alpha)``.
    The limit is extrapolated with Aitken's delta-squared.
    """
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    if p.r_max < 0.5:
        raise DomainError("profile must cover r = 1/2")
    if k_max is None:
        k_max = 20 if p.r_min == 0 else int(math.floor(-math.log2(p.r_min))) - 1
    if k_max < 3 or 2.0 ** -(k_max + 1) < p.r_min:
        raise DomainError("profile does not cover the dyadic points")
    C = K_fit * 2.0 ** (p.n - 1) / surface_area(p.n)
    k = np.arange(1, k_max + 2)
    vals = np.asarray(p.u_at(2.0 ** -k.astype(float)), dtype=float)
    diffs = np.abs(np.diff(vals))
    bounds = C * 2.0 ** (-k[:-1] * alpha)
    violation = float(np.max(diffs - bounds))
    a0, a1, a2 = vals[-3:]
    denom = a2 - 2 * a1 + a0
    limit = a2 - (a2 - a1) ** 2 / denom if denom != 0 and math.isfinite(denom) else a2
    if not math.isfinite(limit):
        limit = float(a2)
    return RemovabilityReport(holds=violation <= 0, limit=float(limit), max_violation=violation,
                              constant=C, k_max=int(k_max), differences=diffs)
