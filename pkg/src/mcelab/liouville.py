"""Annulus averages and Liouville growth thresholds for radial profiles."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError
from .exponents import q_n, radial_threshold
from .inequality_lab import InequalityReport
from .numerics import ball_volume, fit_power_law, integrate, surface_area
from .radial_solver import RadialProfile
from .reports import jsonable

__all__ = [
    "SELECTORS",
    "GrowthVerdict",
    "annulus_average",
    "annulus_sweep_csv",
    "default_R_list",
    "growth_classify",
    "liouville_inequality_radial",
]


def _inv_sqrt(z):
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise DomainError("z = 0 on the annulus: 1/sqrt(z) undefined")
    return 1.0 / np.sqrt(z)


SELECTORS = {
    "z": lambda z: z,
    "z2_weighted": lambda z: z * z / (1 + z) ** 1.5,
    "z_weighted": lambda z: z / (1 + z) ** 1.5,
    "inv_sqrt_z": _inv_sqrt,
}


def annulus_average(p: RadialProfile, R: float, integrand: str = "z", n: Optional[int] = None) -> float:
    """Mean of ``integrand(z)`` over ``B_2R \\ B_R``."""
    n = p.n if n is None else n
    if integrand not in SELECTORS:
        raise DomainError(f"unknown integrand {integrand!r}; choose from {sorted(SELECTORS)}")
    if not R > 0 or R < p.r_min or 2 * R > p.r_max:
        raise DomainError("annulus must lie inside the profile range")
    h = SELECTORS[integrand]
    total = surface_area(n) * integrate(lambda r: h(p.z_at(r)) * r ** (n - 1), (R, 2 * R))
    return total / (ball_volume(n) * (2.0 ** n - 1.0) * R ** n)


def default_R_list(R0: float, count: int = 6) -> list[float]:
    return [R0 * 2.0 ** k for k in range(count)]


def annulus_sweep_csv(p: RadialProfile, R_list: Sequence[float], integrand: str = "z") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["R", "average", "integrand"])
    for R in R_list:
        w.writerow([repr(float(R)), repr(annulus_average(p, R, integrand)), integrand])
    return buf.getvalue()


@dataclass
class GrowthVerdict:
    fitted_slope: float
    threshold: float
    regime: str  # general | radial
    verdict: str  # consistent_with_nonconstant | forces_constant | low_dim_no_nonconstant
    n: int
    samples: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if self.verdict == "low_dim_no_nonconstant" and not (self.regime == "radial" and self.n <= 6):
            raise DomainError("low-dimensional verdict only applies to radial profiles with n <= 6")

    def to_dict(self) -> dict:
        return jsonable({"fitted_slope": self.fitted_slope, "threshold": self.threshold,
                         "regime": self.regime, "verdict": self.verdict, "n": self.n})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def growth_classify(p: RadialProfile, n: int, regime: str, R_list: Optional[Sequence[float]] = None) -> GrowthVerdict:
    """Compare the fitted growth of annulus averages with the Liouville threshold.

    ``general`` averages ``z`` against ``2 q_n``; ``radial``
    averages ``z/(1+z)^(3/2)`` against ``-n + 2 sqrt(n-1) + 2``. A slope
    strictly below the threshold is incompatible with a nonconstant stable
    solution. Radial profiles in dimensions 2..6 are classified without data.
    """
    if regime == "general":
        threshold, selector = 2.0 * q_n(n), "z"
    elif regime == "radial":
        threshold, selector = radial_threshold(n), "z_weighted"
    else:
        raise DomainError(f"unknown regime {regime!r}")
    if R_list is None:
        R_list = default_R_list(p.r_max / 64.0)
    R_list = [float(R) for R in R_list]
    low_dim = regime == "radial" and n <= 6
    if len(R_list) < 4:
        raise DomainError("need at least 4 radii")
    try:
        samples = [(R, annulus_average(p, R, selector, n)) for R in R_list]
        slope = fit_power_law(samples).slope
    except DomainError:
        if not low_dim:
            raise
        samples, slope = [], float("nan")
    if low_dim:
        verdict = "low_dim_no_nonconstant"
    elif slope < threshold:
        verdict = "forces_constant"
    else:
        verdict = "consistent_with_nonconstant"
    return GrowthVerdict(float(slope), float(threshold), regime, verdict, int(n), samples)


def liouville_inequality_radial(p: RadialProfile, n: int, rho: float, R: float) -> InequalityReport:
    """Both integrals of the radial Liouville estimate and the constant they require.

    ``lhs = rho^(-2a) int_{B_rho} z^2/(1+z)^(3/2)`` and
    ``rhs = R^(-2a) int_{B_2R \\ B_R} z/(1+z)^(3/2)`` with ``a = sqrt(n-1) + 1``.
    ``params["required_C"] = lhs / rhs`` with ``0/0 -> 0`` and ``x/0 -> inf``.
    """
    if not 0 < rho < R:
        raise DomainError("need 0 < rho < R")
    if p.r_min > 0 or 2 * R > p.r_max:
        raise DomainError("profile must cover [0, 2R]")
    a = math.sqrt(n - 1) + 1.0
    omega = surface_area(n)
    inner = integrate(lambda r: SELECTORS["z2_weighted"](p.z_at(r)) * r ** (n - 1), (0.0, rho), points=(0.0,))
    outer = integrate(lambda r: SELECTORS["z_weighted"](p.z_at(r)) * r ** (n - 1), (R, 2 * R))
    lhs = rho ** (-2 * a) * omega * inner
    rhs = R ** (-2 * a) * omega * outer
    if rhs > 0:
        required = lhs / rhs
    else:
        required = 0.0 if lhs == 0 else math.inf
    return InequalityReport(lhs, rhs, {"n": n, "a": a, "rho": rho, "R": R, "required_C": required,
                                       "convention": "required_C = 0 when both sides vanish"})
