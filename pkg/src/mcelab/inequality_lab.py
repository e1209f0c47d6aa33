"""Explicit-constant checks of the gradient estimate, Hardy inequality and slab example.

Every check returns an :class:`InequalityReport` with both sides and
``margin = rhs - lhs``; nothing here hides a constant.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError
from .morrey import ball_mass_slab
from .nonlinearity import CounterexampleF, Nonlinearity
from .numerics import fit_power_law, integrate, surface_area
from .radial_solver import RadialProfile, SlabProfile, residual_slab
from .reports import jsonable

__all__ = [
    "InequalityReport",
    "CheckResult",
    "CounterexampleReport",
    "CutoffSpec",
    "L_terms",
    "st_quadratic",
    "key_estimate_rhs_integrand",
    "key_estimate_radial",
    "hardy_check",
    "hardy_fuzz",
    "random_hardy_psi",
    "compute_r0",
    "lambda_star",
    "counterexample_verify",
]

_FEAS_RTOL = 1e-12


@dataclass
class InequalityReport:
    lhs: float
    rhs: float
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.lhs = float(self.lhs)
        self.rhs = float(self.rhs)
        if not (math.isfinite(self.lhs) and math.isfinite(self.rhs)):
            raise DomainError(f"non-finite inequality sides: {self.lhs}, {self.rhs}")

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    def to_dict(self) -> dict:
        return jsonable({"lhs": self.lhs, "rhs": self.rhs, "margin": self.margin, "params": self.params})


@dataclass(frozen=True)
class CutoffSpec:
    """Radial C^2 cutoff: 1 on ``|x| <= inner``, 0 on ``|x| >= outer``.

    The transition is the quintic smoothstep ``1 - (6t^5 - 15t^4 + 10t^3)``.
    """

    inner: float
    outer: float
    kind: str = "radial_smoothstep"

    def __post_init__(self):
        if self.kind != "radial_smoothstep":
            raise DomainError(f"unknown cutoff kind {self.kind!r}")
        if not 0 < self.inner < self.outer:
            raise DomainError("cutoff needs 0 < inner < outer")

    def _t(self, r):
        return np.clip((np.asarray(r, dtype=float) - self.inner) / (self.outer - self.inner), 0.0, 1.0)

    def phi(self, r):
        t = self._t(r)
        return 1.0 - t ** 3 * (10.0 - 15.0 * t + 6.0 * t * t)

    def dphi(self, r):
        """Radial derivative (nonpositive)."""
        t = self._t(r)
        return -30.0 * t * t * (1.0 - t) ** 2 / (self.outer - self.inner)


def _check_feasible(x_norm, x_dot_grad, z):
    x_norm = np.asarray(x_norm, dtype=float)
    x_dot_grad = np.asarray(x_dot_grad, dtype=float)
    z = np.asarray(z, dtype=float)
    if np.any(x_norm <= 0):
        raise DomainError("|x| must be positive")
    if np.any(z < 0):
        raise DomainError("z must be nonnegative")
    if np.any(x_dot_grad ** 2 > x_norm ** 2 * z * (1 + _FEAS_RTOL) + 1e-300):
        raise DomainError("infeasible input: (x . grad u)^2 > |x|^2 z")
    return x_norm, x_dot_grad, z


def L_terms(n: int, a: float, x_norm, x_dot_grad, z):
    """The three remainder terms of the weighted gradient estimate.

    In the radial case ``x_dot_grad^2 = |x|^2 z`` their sum reduces to
    ``z((n-1)z + (-a^2+2a+n-2)) / (|x|^(2a) (1+z)^(3/2))``.
    """
    x, xg, z = _check_feasible(x_norm, x_dot_grad, z)
    den = (1.0 + z) ** 1.5
    L1 = a * a * xg ** 4 / (x ** (2 * a + 4) * den)
    L2 = a * ((2 - a) * z + 4 - a) * xg ** 2 / (x ** (2 * a + 2) * den)
    L3 = z * ((n - 1 - 2 * a) * z + (n - 2 - 2 * a)) / (x ** (2 * a) * den)
    if np.ndim(L1) == 0:
        return float(L1), float(L2), float(L3)
    return L1, L2, L3


def st_quadratic(n: int, a: float, x_norm, x_dot_grad, z):
    """``alpha s^2 + beta s t + gamma t^2`` with the leading coefficients of L1+L2+L3."""
    x, xg, z = _check_feasible(x_norm, x_dot_grad, z)
    s = xg ** 2 / (x ** (a + 2) * (1 + z) ** 0.75)
    t = 1.0 / (x ** a * (1 + z) ** 0.75)
    val = a * a * s * s + a * (2 - a) * z * s * t + (n - 1 - 2 * a) * z * z * t * t
    return float(val) if np.ndim(val) == 0 else val


def key_estimate_rhs_integrand(a: float, x_norm, x_dot_grad, grad_dot_dphi, x_dot_dphi, dphi_sq, z, phi):
    """Pointwise right side of the gradient estimate for general geometry.

    The last term is ``-2 z phi (x . grad phi) / (|x|^(2a) sqrt(1+z))``,
    the form produced by expanding ``x . grad eta`` with ``eta = |x|^-a phi``.
    """
    x, xg, ud, xd, g2 = x_norm, x_dot_grad, grad_dot_dphi, x_dot_dphi, dphi_sq
    s1 = np.sqrt(1.0 + z)
    s3 = (1.0 + z) ** 1.5
    return (
        -xg ** 2 * ud ** 2 / (x ** (2 * a) * s3)
        + xg ** 2 * g2 / (x ** (2 * a) * s1)
        + 2 * a * xg ** 3 * ud * phi / (x ** (2 * (a + 1)) * s3)
        - 2 * a * xg ** 2 * xd * phi / (x ** (2 * (a + 1)) * s1)
        + 2 * (2 + z) * xg * ud * phi / (x ** (2 * a) * s3)
        - 2 * z * phi * xd / (x ** (2 * a) * s1)
    )


def key_estimate_radial(p: RadialProfile, nl: Nonlinearity, n: int, a: float, rho: float, R: float,
                        phi: Optional[CutoffSpec] = None, tol: float = 1e-10) -> InequalityReport:
    """Both sides of the explicit gradient estimate for a radial profile.

    LHS = rho^(-2a) int_{B_rho} z((n-1)z+(n-2))/(1+z)^(3/2)
          + int_{B_2R \\ B_rho} (L1+L2+L3) phi^2,
    RHS = int_{B_2R \\ B_rho} [ z|phi'|^2 |x|^(2-2a) + 2(a-1) z phi |phi'| |x|^(1-2a) ] / (1+z)^(3/2).

    ``params["rhs_general"]`` carries the same right side evaluated from the
    six-term general integrand as an independent route. ``nl`` is not used
    numerically; stability is the caller's responsibility.
    """
    if n != p.n:
        raise DomainError("dimension mismatch with the profile")
    if not 0 < rho < R:
        raise DomainError("need 0 < rho < R")
    if p.r_min > 0 or 2 * R > p.r_max:
        raise DomainError("profile must cover [0, 2R]")
    if phi is None:
        phi = CutoffSpec(R, 2 * R)
    if phi.inner < rho or phi.outer > 2 * R:
        raise DomainError("cutoff must equal 1 on B_rho and vanish outside B_2R")
    omega = surface_area(n)

    def inner(r):
        z = p.z_at(r)
        return z * ((n - 1) * z + (n - 2)) / (1 + z) ** 1.5 * r ** (n - 1)

    def annulus_lhs(r):
        du = p.du_at(r)
        L1, L2, L3 = L_terms(n, a, r, r * du, du * du)
        return (L1 + L2 + L3) * phi.phi(r) ** 2 * r ** (n - 1)

    def annulus_rhs(r):
        z = p.z_at(r)
        ph, dph = phi.phi(r), np.abs(phi.dphi(r))
        return ((z * dph ** 2 * r ** (2 - 2 * a) + 2 * (a - 1) * z * ph * dph * r ** (1 - 2 * a))
                / (1 + z) ** 1.5 * r ** (n - 1))

    def annulus_rhs_general(r):
        du = p.du_at(r)
        dph = phi.dphi(r)
        val = key_estimate_rhs_integrand(a, r, r * du, du * dph, r * dph, dph * dph, du * du, phi.phi(r))
        return val * r ** (n - 1)

    ball = omega * integrate(inner, (0.0, rho), tol=tol, points=(0.0,))
    kinks = (phi.inner, phi.outer)
    lhs = rho ** (-2 * a) * ball + omega * integrate(annulus_lhs, (rho, 2 * R), tol=tol, points=kinks)
    rhs = omega * integrate(annulus_rhs, (rho, 2 * R), tol=tol, points=kinks)
    rhs_general = omega * integrate(annulus_rhs_general, (rho, 2 * R), tol=tol, points=kinks)
    return InequalityReport(lhs, rhs, {
        "n": n, "a": a, "rho": rho, "R": R,
        "cutoff": f"{phi.kind}[{phi.inner}, {phi.outer}] (C^2, not C^inf)",
        "ball_term": ball, "rhs_general": rhs_general,
    })


def hardy_check(beta: float, psi: Callable, dpsi: Callable, tol: float = 1e-12) -> InequalityReport:
    """``int |t|^(beta-2) psi^2 <= (2/(beta-1))^2 int |t|^beta psi'^2`` on (-1, 1)."""
    if not beta > 1:
        raise DomainError("Hardy inequality needs beta > 1")
    ends = np.asarray(psi(np.array([-1.0, 1.0])), dtype=float)
    if np.any(np.abs(ends) > 1e-12):
        raise DomainError("psi must vanish at t = +-1")
    lhs = integrate(lambda t: np.abs(t) ** (beta - 2) * psi(t) ** 2, (-1.0, 1.0), tol=tol, points=(0.0,))
    rhs = (2 / (beta - 1)) ** 2 * integrate(lambda t: np.abs(t) ** beta * dpsi(t) ** 2, (-1.0, 1.0),
                                            tol=tol, points=(0.0,))
    return InequalityReport(lhs, rhs, {"beta": beta})


def random_hardy_psi(rng: np.random.Generator, trials: int, degree: int = 8, width: float = 1.0):
    """Coefficient matrix of random test functions ``P(t/width) (1 - (t/width)^2)^2``."""
    if trials < 1 or degree < 0:
        raise DomainError("need trials >= 1 and degree >= 0")
    return rng.standard_normal((trials, degree + 1))


def _poly_bump(coeffs, width):
    """Batched values and derivatives of ``P(s)(1-s^2)^2`` with ``s = t/width``."""
    dcoeffs = np.polynomial.polynomial.polyder(coeffs.T).T if coeffs.shape[1] > 1 else np.zeros_like(coeffs)

    def vals(t):
        s = t / width
        P = np.polynomial.polynomial.polyval(s, coeffs.T)
        return P * (1 - s * s) ** 2

    def ders(t):
        s = t / width
        P = np.polynomial.polynomial.polyval(s, coeffs.T)
        dP = np.polynomial.polynomial.polyval(s, dcoeffs.T)
        return (dP * (1 - s * s) ** 2 - 4 * s * P * (1 - s * s)) / width

    return vals, ders


def hardy_fuzz(betas: Sequence[float] = (1.5, 2.0, 3.0, 4.0), trials: int = 1000, seed: int = 42,
               degree: int = 8, tol: float = 1e-11) -> list[InequalityReport]:
    """Hardy check over a seeded corpus of polynomial bumps, batched per beta.

    Returns one report per ``(beta, trial)``; the corpus is shared across betas.
    """
    rng = np.random.default_rng(seed)
    coeffs = random_hardy_psi(rng, trials, degree)
    vals, ders = _poly_bump(coeffs, 1.0)
    out = []
    for beta in betas:
        if not beta > 1:
            raise DomainError("Hardy inequality needs beta > 1")
        lhs = integrate(lambda t: np.abs(t) ** (beta - 2) * vals(t) ** 2, (-1.0, 1.0), tol=tol, points=(0.0,))
        rhs = (2 / (beta - 1)) ** 2 * integrate(lambda t: np.abs(t) ** beta * ders(t) ** 2, (-1.0, 1.0),
                                                tol=tol, points=(0.0,))
        out.extend(InequalityReport(l, r, {"beta": beta, "trial": i, "seed": seed})
                   for i, (l, r) in enumerate(zip(lhs, rhs)))
    return out


def lambda_star(a: float) -> float:
    """``4a(2a-1)/(3a-1)^2``: the weight constant closing the Hardy step."""
    if not 0.5 < a < 1:
        raise DomainError("need 1/2 < a < 1")
    return 4 * a * (2 * a - 1) / (3 * a - 1) ** 2


def compute_r0(a: float, lam: float) -> tuple[float, float]:
    """``r1 = [(1-a)^2 (lam^(-2/3) - 1)]^(1/(2a))`` and ``r0 = min(1, r1)``."""
    if not 0.5 < a < 1:
        raise DomainError("need 1/2 < a < 1")
    if not 0 < lam < 1:
        raise DomainError("need 0 < lam < 1")
    r1 = ((1 - a) ** 2 * (lam ** (-2.0 / 3.0) - 1)) ** (1 / (2 * a))
    return r1, min(1.0, r1)


@dataclass
class CheckResult:
    check_id: str
    lhs: float
    rhs: float
    tol: float
    params: dict = field(default_factory=dict)
    strict: bool = False  # require margin > 0 instead of margin >= -tol

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        if not (math.isfinite(self.lhs) and math.isfinite(self.rhs)):
            return False
        return self.margin > 0 if self.strict else self.margin >= -self.tol

    def to_dict(self) -> dict:
        return jsonable({"check_id": self.check_id, "lhs": self.lhs, "rhs": self.rhs, "margin": self.margin,
                         "tol": self.tol, "passed": self.passed, "params": self.params})


@dataclass
class CounterexampleReport:
    a: float
    n: int
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def get(self, check_id: str) -> CheckResult:
        for c in self.checks:
            if c.check_id == check_id:
                return c
        raise KeyError(check_id)

    def to_dict(self) -> dict:
        return {"a": self.a, "n": self.n, "passed": self.passed, "checks": [c.to_dict() for c in self.checks]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _slab_form_battery(s: SlabProfile, nl: Nonlinearity, r0: float, trials: int, seed: int):
    """Reduced second variation on random bumps supported in (-r0, r0)."""
    rng = np.random.default_rng(seed)
    coeffs = random_hardy_psi(rng, trials, degree=6)
    vals, ders = _poly_bump(coeffs, r0)
    pot = integrate(lambda x: nl.fprime(s.G(x)) * vals(x) ** 2, (-r0, r0), tol=1e-11, points=(0.0,))
    kin = integrate(lambda x: s.weight(x) * ders(x) ** 2, (-r0, r0), tol=1e-11, points=(0.0,))
    return pot, kin


def counterexample_verify(a: float, n: int, report_detail: bool = False, b: float = 0.5,
                          trials: int = 200, seed: int = 42, mesh: int = 2000) -> CounterexampleReport:
    """Run every step of the slab counterexample and aggregate the sub-checks.

    Order: residual, potential bound, weight bound, Hardy closure and
    batteries, Morrey scaling, and the direct eigenvalue check (only when
    ``a >= 2/3``). Failures are kept in the report, never dropped.
    """
    from .stability import TOL_EIG, min_eigenvalue_slab

    if not 0.5 < a < 1:
        raise DomainError("need 1/2 < a < 1")
    if int(n) != n or n < 2:
        raise DomainError("need integer n >= 2")
    s = SlabProfile(n, a)
    nl = CounterexampleF(a)
    lam = lambda_star(a)
    r1, r0 = compute_r0(a, lam)
    checks: list[CheckResult] = []
    base = {"a": a, "n": n}

    # step 1: the profile solves the equation away from x1 = 0
    grid = np.logspace(-3, 0, 121)
    xs = np.concatenate([-grid[::-1], grid])
    res_a = max(residual_slab(s, nl, float(x), "analytic") for x in xs)
    res_n = max(residual_slab(s, nl, float(x), "numeric") for x in xs)
    checks.append(CheckResult("step1_residual", max(res_a, res_n), 0.0, 1e-8,
                              {**base, "analytic": res_a, "numeric": res_n, "points": xs.size}))

    # step 2: f'(G) <= a(2a-1)/(1-a)^3 |x1|^(3a-2)
    fp = nl.fprime(s.G(grid))
    bound = a * (2 * a - 1) / (1 - a) ** 3 * grid ** (3 * a - 2)
    k = int(np.argmin(bound - fp))
    checks.append(CheckResult("step2_fprime_bound", float(fp[k]), float(bound[k]), 1e-12,
                              {**base, "x1": float(grid[k])}))

    # step 2/3: (1+z)^(-3/2) >= lam |x1|^(3a) / (1-a)^3 on |x1| <= r1
    wgrid = np.logspace(math.log10(r1) - 4, math.log10(r1), 121)
    wlo = lam * wgrid ** (3 * a) / (1 - a) ** 3
    wv = s.weight(wgrid)
    k = int(np.argmin(wv - wlo))
    checks.append(CheckResult("step3_weight_bound", float(wlo[k]), float(wv[k]), 1e-12 * float(wv[k]),
                              {**base, "x1": float(wgrid[k]), "lambda": lam, "r1": r1}))

    # step 3: Hardy constant with beta = 3a closes exactly at lambda
    closure = (2 / (3 * a - 1)) ** 2 * a * (2 * a - 1)
    checks.append(CheckResult("step3_closure", abs(closure - lam), 0.0, 1e-12,
                              {**base, "hardy_const_times_bound": closure, "lambda": lam}))
    hardy = hardy_fuzz(betas=(3 * a,), trials=trials, seed=seed)
    worst = min(hardy, key=lambda rep: rep.margin + 1e-8 * (1 + rep.rhs))
    checks.append(CheckResult("step3_hardy_battery", worst.lhs, worst.rhs, 1e-8 * (1 + worst.rhs),
                              {**base, "beta": 3 * a, "trials": trials, "seed": seed}))
    pot, kin = _slab_form_battery(s, nl, r0, trials, seed)
    k = int(np.argmin(kin - pot))
    checks.append(CheckResult("step3_reduced_form", float(pot[k]), float(kin[k]), 1e-8 * (1 + float(kin[k])),
                              {**base, "r0": r0, "trials": trials, "seed": seed}))

    # Morrey: mass at the singular plane scales like rho^(n-a)
    rhos = [2.0 ** -j for j in range(1, 7)]
    g = s.grad_abs
    masses = [ball_mass_slab(g, n, 0.0, r) for r in rhos]
    slope = fit_power_law(zip(rhos, masses)).slope
    checks.append(CheckResult("morrey_slope", abs(slope - (n - a)), 0.0, 0.02,
                              {**base, "slope": slope, "expected": n - a}))
    for label, p_exp in (("morrey_member", n / a), ("morrey_nonmember_growth", n / a + b)):
        expo = n * (1 - 1 / p_exp)
        obj = [(r, r ** (-expo) * m) for r, m in zip(rhos, masses)]
        growth = -fit_power_law(obj).slope
        expected = expo - (n - a)
        if label == "morrey_member":
            checks.append(CheckResult(label, abs(growth), 0.0, 0.02, {**base, "p": p_exp, "growth": growth}))
        else:
            checks.append(CheckResult(label, 0.0, growth, 0.0,
                                      {**base, "p": p_exp, "b": b, "expected": expected}, strict=True))

    if a >= 2.0 / 3.0:
        rep = min_eigenvalue_slab(s, nl, r0, m=mesh)
        checks.append(CheckResult("step3_slab_eigenvalue", 0.0, rep.min_eigenvalue, TOL_EIG,
                                  {**base, "half_width": r0, "mesh": mesh, "regime": rep.regime}))

    if report_detail:
        for c in checks:
            c.params.setdefault("r0", r0)
            c.params.setdefault("r1", r1)
    return CounterexampleReport(a=a, n=int(n), checks=checks)
