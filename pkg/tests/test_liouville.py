import math

import numpy as np
import pytest
from scipy.integrate import quad

from mcelab.errors import DomainError
from mcelab.exponents import a_liouville, q_n, radial_threshold
from mcelab.liouville import (
    GrowthVerdict,
    annulus_average,
    annulus_sweep_csv,
    growth_classify,
    liouville_inequality_radial,
)
from mcelab.numerics import ball_volume
from mcelab.radial_solver import cap_profile, constant_profile, profile_from_callables


def power_profile(n, q, r_lo=0.0, r_hi=1e4):
    return profile_from_callables(n, np.geomspace(max(r_lo, 1e-6), r_hi, 60) if r_lo > 0 else np.linspace(0, r_hi, 60),
                                  lambda r: (1 + r) ** (q + 1) / (q + 1), lambda r: (1 + r) ** q)


def test_average_of_constant():
    p = profile_from_callables(3, np.linspace(0, 5, 10), lambda r: 2 * r, lambda r: 2 + 0 * r)
    assert annulus_average(p, 1.0, "z") == pytest.approx(4.0, rel=1e-12)
    assert annulus_average(constant_profile(3, 1.0, np.linspace(0, 5, 10)), 1.0, "z") == 0.0


def test_average_closed_form():
    p = profile_from_callables(3, np.linspace(0, 3, 10), lambda r: r * r / 2, lambda r: r)
    assert annulus_average(p, 1.0, "z") == pytest.approx(93 / 35, rel=1e-12)


def test_inverse_sqrt_selector():
    p = profile_from_callables(3, np.linspace(0, 3, 10), lambda r: r * r / 2, lambda r: r)
    # 4 pi int_1^2 r dr / (v_3 (2^3 - 1))
    assert annulus_average(p, 1.0, "inv_sqrt_z") == pytest.approx(
        (4 * math.pi * 1.5) / (ball_volume(3) * 7), rel=1e-12)
    with pytest.raises(DomainError):
        annulus_average(constant_profile(3, 0.0, np.linspace(0, 3, 10)), 1.0, "inv_sqrt_z")
    with pytest.raises(DomainError):
        annulus_average(p, 1.0, "nope")


def test_growth_low_dim_radial():
    for n in range(2, 7):
        zp = constant_profile(n, 0.0, np.linspace(0, 100, 10))
        assert growth_classify(zp, n, "radial").verdict == "low_dim_no_nonconstant"
        cap = cap_profile(n, float(n), 0.0, np.linspace(0, 0.99, 50))
        assert growth_classify(cap, n, "radial", [0.01, 0.02, 0.04, 0.08]).verdict == "low_dim_no_nonconstant"


def test_low_dim_verdict_guard():
    with pytest.raises(DomainError):
        GrowthVerdict(0.0, 0.0, "general", "low_dim_no_nonconstant", 4)
    with pytest.raises(DomainError):
        GrowthVerdict(0.0, 0.0, "radial", "low_dim_no_nonconstant", 7)


def test_growth_synthetic_general():
    R = [10 * 2 ** k for k in range(8)]
    below = power_profile(12, q_n(12) - 0.5)
    above = power_profile(12, q_n(12) + 0.3)
    assert growth_classify(below, 12, "general", R).verdict == "forces_constant"
    assert growth_classify(above, 12, "general", R).verdict == "consistent_with_nonconstant"


@pytest.mark.parametrize("q", [-2.3, -0.5, 0.4])
def test_slope_recovery_exact_powers(q):
    p = profile_from_callables(8, np.geomspace(1, 1e4, 40), lambda r: r ** (q + 1) / (q + 1), lambda r: r ** q)
    R = list(np.geomspace(1, 1000, 7))  # three decades
    v = growth_classify(p, 8, "general", R)
    assert v.fitted_slope == pytest.approx(2 * q, abs=1e-2)
    assert v.threshold == pytest.approx(-2.0)


def test_growth_radial_high_dim():
    n = 8
    p = profile_from_callables(n, np.geomspace(1, 1e4, 40), lambda r: np.log(r), lambda r: 1 / r)
    v = growth_classify(p, n, "radial", list(np.geomspace(1, 1000, 7)))
    # z/(1+z)^1.5 ~ r^-2 lies below the threshold -8 + 2 sqrt(7) + 2 ~ -0.708
    assert v.threshold == pytest.approx(radial_threshold(n))
    assert v.fitted_slope == pytest.approx(-2.0, abs=0.05)
    assert v.verdict == "forces_constant"


def test_general_regime_fit_failure_propagates():
    with pytest.raises(DomainError):
        growth_classify(constant_profile(12, 0.0, np.linspace(0, 100, 10)), 12, "general", [1, 2, 4, 8])


@pytest.mark.parametrize("n", range(2, 101))
def test_threshold_identities(n):
    a = math.sqrt(n - 1) + 1
    assert abs(radial_threshold(n) - (2 * a - n)) <= 1e-12
    assert abs(2 * q_n(n) - (2 * a_liouville(n) - n)) <= 1e-12


def test_elementary_inequalities():
    z = np.logspace(-8, 8, 10 ** 4)
    w = z / (1 + z) ** 1.5
    assert np.all(w <= z)
    assert np.all(w <= z ** -0.5)


def test_liouville_inequality_cases():
    zp = constant_profile(3, 0.0, np.linspace(0, 1, 10))
    rep = liouville_inequality_radial(zp, 3, 0.1, 0.4)
    assert (rep.lhs, rep.rhs, rep.params["required_C"]) == (0.0, 0.0, 0.0)
    cone = profile_from_callables(3, np.linspace(0, 1, 10), lambda r: -r, lambda r: -np.ones_like(r))
    rep = liouville_inequality_radial(cone, 3, 0.1, 0.4)
    a = math.sqrt(2) + 1
    assert rep.params["required_C"] == pytest.approx(0.1 ** (3 - 2 * a) / (7 * 0.4 ** (3 - 2 * a)), rel=1e-10)
    # gradient only near the center: rhs vanishes
    bump = profile_from_callables(3, np.linspace(0, 1, 10), lambda r: 0 * r,
                                  lambda r: np.where(r < 0.2, r * (0.2 - r), 0.0))
    rep = liouville_inequality_radial(bump, 3, 0.1, 0.3)
    assert rep.params["required_C"] == math.inf
    assert rep.to_dict()["params"]["required_C"] == "inf"


def test_cap_required_constant_regression():
    cap = cap_profile(3, 3.0, 0.0, np.linspace(0, 0.99, 200))
    rep = liouville_inequality_radial(cap, 3, 0.1, 0.4)
    # independent route: scipy quad on the closed-form cap gradient
    a = math.sqrt(2) + 1
    z = lambda r: (r * r) / (1 - r * r)
    inner = quad(lambda r: z(r) ** 2 / (1 + z(r)) ** 1.5 * r * r, 0, 0.1, epsabs=1e-15)[0]
    outer = quad(lambda r: z(r) / (1 + z(r)) ** 1.5 * r * r, 0.4, 0.8, epsabs=1e-15)[0]
    ref = (0.1 ** (-2 * a) * inner) / (0.4 ** (-2 * a) * outer)
    assert rep.params["required_C"] == pytest.approx(ref, rel=1e-8)
    # frozen from the first verified run
    assert rep.params["required_C"] == pytest.approx(REQUIRED_C_CAP, rel=1e-8)


REQUIRED_C_CAP = 0.0002516937382983254


def test_sweep_csv():
    cap = cap_profile(3, 3.0, 0.0, np.linspace(0, 0.99, 50))
    lines = annulus_sweep_csv(cap, [0.05, 0.1, 0.2], "z_weighted").strip().split("\n")
    assert lines[0] == "R,average,integrand" and len(lines) == 4
