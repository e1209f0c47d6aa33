import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate as sint

from mcelab.errors import DomainError, QuadratureError
from mcelab.numerics import (
    Interval,
    ball_integral_radial,
    ball_volume,
    fit_power_law,
    integrate,
    sphere_area,
    surface_area,
)


def test_linear_integrand():
    assert integrate(lambda t: t, (0.0, 1.0)) == pytest.approx(0.5, abs=1e-14)


def test_polynomial_bump_closed_form():
    val = integrate(lambda t: np.abs(t) * (1 - t * t) ** 4, (-1.0, 1.0), points=(0.0,))
    assert val == pytest.approx(0.2, abs=1e-12)


def test_endpoint_singularity():
    val, err = integrate(lambda t: t ** -0.5, (0.0, 1.0), points=(0.0,), full_output=True)
    assert abs(val - 2.0) < 1e-9
    assert err < 1e-8


def test_interior_singularity_against_closed_form():
    sigma = -0.9
    exact = (1.0 + 2.0 ** (sigma + 1)) / (sigma + 1)
    assert integrate(lambda t: np.abs(t) ** sigma, (-1.0, 2.0), points=(0.0,)) == pytest.approx(exact, rel=1e-9)


def test_too_strong_singularity_reports_estimate():
    with pytest.raises(QuadratureError) as info:
        integrate(lambda t: np.abs(t) ** -0.99, (-1.0, 1.0), points=(0.0,), limit=300)
    assert info.value.estimate > 10


def test_vector_valued_integrand():
    vals = integrate(lambda t: np.vstack([t, t * t, np.cos(t)]), (0.0, 1.0))
    np.testing.assert_allclose(vals, [0.5, 1 / 3, math.sin(1.0)], rtol=1e-12)


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=6), st.floats(-2, 2), st.floats(0.1, 3))
def test_polynomials_match_exact_antiderivative(coeffs, lo, width):
    hi = lo + width
    poly = np.polynomial.Polynomial(coeffs)
    exact = poly.integ()(hi) - poly.integ()(lo)
    got = integrate(poly, (lo, hi), tol=1e-12)
    assert abs(got - exact) <= 1e-10 * (1 + abs(exact))


@given(st.floats(-0.8, 2.0), st.floats(0.2, 3.0))
def test_power_weights_against_scipy_quad(sigma, hi):
    got = integrate(lambda t: t ** sigma * np.exp(-t), (0.0, hi), points=(0.0,))
    ref = sint.quad(lambda t: t ** sigma * math.exp(-t), 0.0, hi, limit=200, epsabs=1e-13, epsrel=1e-12)[0]
    assert got == pytest.approx(ref, rel=1e-8)


def test_interval_validation():
    with pytest.raises(DomainError):
        Interval(1.0, 1.0)
    with pytest.raises(DomainError):
        Interval(0.0, math.inf)
    assert Interval(0.0, 2.0).contains(Interval(0.5, 1.0))


@pytest.mark.parametrize("n", range(2, 12))
def test_sphere_and_ball_against_mpmath(n):
    area = 2 * mpmath.pi ** (mpmath.mpf(n) / 2) / mpmath.gamma(mpmath.mpf(n) / 2)
    vol = mpmath.pi ** (mpmath.mpf(n) / 2) / mpmath.gamma(mpmath.mpf(n) / 2 + 1)
    assert surface_area(n) == pytest.approx(float(area), rel=1e-13)
    assert ball_volume(n) == pytest.approx(float(vol), rel=1e-13)
    assert surface_area(n) == pytest.approx(n * ball_volume(n), rel=1e-13)


def test_low_dimensional_spheres():
    assert sphere_area(0) == pytest.approx(2.0)
    assert sphere_area(1) == pytest.approx(2 * math.pi)
    assert ball_volume(1) == pytest.approx(2.0)


def test_ball_integral_radial_matches_volume():
    for n in (2, 3, 5):
        got = ball_integral_radial(lambda r: np.ones_like(r), n, 0.7)
        assert got == pytest.approx(ball_volume(n) * 0.7 ** n, rel=1e-12)


def test_ball_integral_singular_density():
    # 4 pi int_0^1 r^-1 r^2 dr
    assert ball_integral_radial(lambda r: 1 / r, 3, 1.0) == pytest.approx(2 * math.pi, rel=1e-12)


@given(st.floats(-3, 3), st.floats(-2, 2))
def test_power_law_fit_recovers_exact_powers(slope, logc):
    R = np.geomspace(0.01, 10, 9)
    fit = fit_power_law(zip(R, math.exp(logc) * R ** slope))
    assert fit.slope == pytest.approx(slope, abs=1e-9)
    assert fit.log_coeff == pytest.approx(logc, abs=1e-8)
    assert fit.max_residual < 1e-9
    np.testing.assert_allclose(fit.predict(R), math.exp(logc) * R ** slope, rtol=1e-8)


def test_power_law_fit_rejects_bad_samples():
    with pytest.raises(DomainError):
        fit_power_law([(1, 1), (2, 2)])
    with pytest.raises(DomainError):
        fit_power_law([(1, 1), (2, 0), (3, 1)])
    with pytest.raises(DomainError):
        fit_power_law([(1, 1), (1, 2), (3, 1)])
