import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate as sint
from scipy.linalg import eigh

from mcelab.errors import DomainError
from mcelab.inequality_lab import compute_r0, lambda_star
from mcelab.nonlinearity import Constant, CounterexampleF, Polynomial, Zero
from mcelab.numerics import Interval, surface_area
from mcelab.radial_solver import SlabProfile, cap_profile, constant_profile, solve_radial_ivp
from mcelab.stability import (
    StabilityReport,
    min_eigenvalue_radial,
    min_eigenvalue_slab,
    quadratic_form_radial,
    radial_pencil,
    slab_pencil,
    smallest_eigenpair,
)

ZERO = constant_profile(3, 0.0, np.linspace(0.0, 2.0, 201))


def dense(pencil, mat):
    d, e = mat
    return np.diag(d) + np.diag(e, 1) + np.diag(e, -1)


def test_quadratic_form_zero_test_function():
    q = quadratic_form_radial(ZERO, Polynomial((0, 4.0)), lambda r: 0 * r, lambda r: 0 * r, Interval(0, 1))
    assert q == 0.0


@pytest.mark.parametrize("kappa", [0.0, 2.0, 15.0])
def test_quadratic_form_against_scipy_quad(kappa):
    got = quadratic_form_radial(ZERO, Polynomial((0, kappa)), lambda r: np.sin(np.pi * r),
                                lambda r: np.pi * np.cos(np.pi * r), Interval(0, 1))
    ref = sint.quad(lambda r: (math.pi ** 2 * math.cos(math.pi * r) ** 2 - kappa * math.sin(math.pi * r) ** 2)
                    * r * r, 0, 1, epsabs=1e-13)[0]
    assert got == pytest.approx(surface_area(3) * ref, abs=1e-8)


@given(st.floats(0.05, 0.4), st.floats(0.5, 0.9))
def test_quadratic_form_nonnegative_when_fprime_nonpositive(lo, hi):
    p = cap_profile(3, 3.0, 0.0, np.linspace(0, 0.95, 100))
    nl = Polynomial((1.0, -2.0))  # f' = -2
    xi = lambda r: np.sin(np.pi * (r - lo) / (hi - lo)) ** 2
    dxi = lambda r: np.pi / (hi - lo) * np.sin(2 * np.pi * (r - lo) / (hi - lo))
    assert quadratic_form_radial(p, nl, xi, dxi, Interval(lo, hi)) >= 0


def test_quadratic_form_support_violation():
    with pytest.raises(DomainError):
        quadratic_form_radial(ZERO, Zero(), np.sin, np.cos, Interval(0.5, 3.0))


@pytest.mark.parametrize("kappa", [0.0, 5.0])
def test_zero_profile_first_eigenvalue(kappa):
    rep = min_eigenvalue_radial(ZERO, Polynomial((0, kappa)), Interval(0, 1), m=2000)
    assert rep.min_eigenvalue == pytest.approx(math.pi ** 2 - kappa, abs=1e-3)
    assert rep.regime == "radial" and rep.label == "radially stable"


def test_potential_shift_is_exact():
    base = min_eigenvalue_radial(ZERO, Polynomial((0, 1.0)), Interval(0, 1), m=400).min_eigenvalue
    for c in (-1.0, 1.0):
        shifted = min_eigenvalue_radial(ZERO, Polynomial((0, 1.0 + c)), Interval(0, 1), m=400).min_eigenvalue
        assert abs(shifted - (base - c)) <= 1e-8


def test_cap_profile_is_radially_stable():
    p = cap_profile(3, 3.0, 0.0, np.linspace(0, 0.99, 200))
    for hi in (0.3, 0.6, 0.95):
        assert min_eigenvalue_radial(p, Constant(3.0), Interval(0, hi), m=300).min_eigenvalue >= 0


def test_unstable_detection():
    rep = min_eigenvalue_radial(ZERO, Polynomial((0, 12.0)), Interval(0, 1), m=500)
    assert rep.min_eigenvalue < -1e-6
    assert rep.label == "radially unstable"


def test_against_dense_generalized_eigensolver():
    nl = Polynomial((0.0, 3.0, -1.0))
    p = solve_radial_ivp(Polynomial((1.0, 0.5)), 3, 0.0, 1.0)
    pen = radial_pencil(p, nl, Interval(0.1, 0.9), 120)
    mu, _ = smallest_eigenpair(pen)
    ref = eigh(dense(pen, pen.A), dense(pen, pen.B), eigvals_only=True)[0]
    assert mu == pytest.approx(ref, abs=1e-9)


def test_rayleigh_consistency():
    p = solve_radial_ivp(Polynomial((1.0, 0.5)), 3, 0.0, 1.0)
    nl = Polynomial((0.0, 8.0))
    rep = min_eigenvalue_radial(p, nl, Interval(0, 1), m=500)
    pen = radial_pencil(p, nl, Interval(0, 1), 500)
    x = rep.eigenvector[pen.interior]
    assert abs(pen.rayleigh(x) - rep.min_eigenvalue) <= 1e-8
    assert rep.eigenvector[-1] == 0.0  # Dirichlet end
    assert rep.eigenvector[0] != 0.0  # the center carries no condition


def test_domain_monotonicity():
    nl = Polynomial((0, 3.0))
    h = 1 / 400
    prev = -math.inf
    for hi in (1.0, 0.8, 0.6, 0.4):
        mu = min_eigenvalue_radial(ZERO, nl, Interval(0, hi), m=round(hi / h)).min_eigenvalue
        assert mu >= prev - 1e-8
        prev = mu
    inner = min_eigenvalue_radial(ZERO, nl, Interval(0.2, 0.6), m=160).min_eigenvalue
    outer = min_eigenvalue_radial(ZERO, nl, Interval(0.1, 0.7), m=240).min_eigenvalue
    assert outer <= inner + 1e-8


def test_mesh_convergence_is_second_order():
    nl = Polynomial((0, 2.0))
    exact = math.pi ** 2 - 2.0
    errs = [abs(min_eigenvalue_radial(ZERO, nl, Interval(0, 1), m=m).min_eigenvalue - exact)
            for m in (250, 500, 1000)]
    for coarse, fine in zip(errs, errs[1:]):
        assert 3.5 < coarse / fine < 4.5


def test_report_json_and_validation():
    rep = min_eigenvalue_radial(ZERO, Zero(), Interval(0, 1), m=50)
    data = json.loads(rep.to_json())
    assert set(data) >= {"min_eigenvalue", "mesh_size", "domain", "regime"}
    with pytest.raises(DomainError):
        StabilityReport(1.0, 4, Interval(0, 1), "radial")
    with pytest.raises(DomainError):
        min_eigenvalue_radial(ZERO, Zero(), Interval(0, 3.0), m=50)


@pytest.mark.parametrize("a", [0.75, 0.9])
def test_slab_direct_check(a):
    r0 = compute_r0(a, lambda_star(a))[1]
    s = SlabProfile(3, a)
    rep = min_eigenvalue_slab(s, CounterexampleF(a), r0, m=2000)
    assert rep.min_eigenvalue >= -1e-6
    assert rep.regime == "slab_reduced"
    assert min_eigenvalue_slab(s, Zero(), r0, m=2000).min_eigenvalue >= 0


def test_slab_against_dense_solver():
    a = 0.75
    r0 = compute_r0(a, lambda_star(a))[1]
    pen = slab_pencil(SlabProfile(2, a), CounterexampleF(a), r0, 150)
    mu, _ = smallest_eigenpair(pen)
    ref = eigh(dense(pen, pen.A), dense(pen, pen.B), eigvals_only=True)[0]
    assert mu == pytest.approx(ref, rel=1e-8)


def test_slab_refusals():
    with pytest.raises(DomainError, match="Hardy"):
        min_eigenvalue_slab(SlabProfile(3, 0.6), CounterexampleF(0.6), 0.01)
    with pytest.raises(DomainError, match="Hardy"):
        min_eigenvalue_slab(SlabProfile(3, 0.65), CounterexampleF(0.65), 0.01)
    with pytest.raises(DomainError):
        min_eigenvalue_slab(SlabProfile(3, 0.75), CounterexampleF(0.75), 0.5)
    with pytest.raises(DomainError):
        min_eigenvalue_slab(SlabProfile(3, 0.75), CounterexampleF(0.8), 0.01)
