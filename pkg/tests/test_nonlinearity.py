import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mcelab.errors import DomainError
from mcelab.nonlinearity import (
    Constant,
    CounterexampleF,
    Polynomial,
    Rescaled,
    Zero,
    eval_f,
    eval_fprime,
    parse_nonlinearity,
    rescale,
)

mpmath.mp.dps = 40


def published_f(a, t):
    """Literal closed form in the original variable (mpmath)."""
    a, t = mpmath.mpf(a), mpmath.mpf(t)
    if t <= 0:
        return mpmath.mpf(0)
    return a * (1 - a) * t ** ((a + 1) / (a - 1)) / (1 + (1 - a) ** 2 * t ** (2 * a / (a - 1))) ** 1.5


@given(st.floats(0.51, 0.99), st.floats(1e-3, 5.0))
def test_counterexample_f_matches_published_form(a, t):
    got = CounterexampleF(a).f(t)
    ref = float(published_f(a, t))
    assert got == pytest.approx(ref, rel=1e-11, abs=1e-300)


@given(st.floats(0.51, 0.99), st.floats(1e-2, 3.0))
def test_counterexample_fprime_matches_numeric_derivative(a, t):
    got = CounterexampleF(a).fprime(t)
    ref = float(mpmath.diff(lambda s: published_f(a, s), t))
    assert got == pytest.approx(ref, rel=1e-9, abs=1e-14)


def test_frozen_value():
    # mpmath oracle for a = 3/4, t = 1: 0.1875 / (1 + 1/16)^1.5
    assert CounterexampleF(0.75).f(1.0) == pytest.approx(0.1875 / (17 / 16) ** 1.5, rel=1e-14)


def test_fprime_sign_change_location():
    # f' changes sign where (1+a) y = (1-a)^2 (2a-1), y = t^(2a/(1-a))
    a = 0.75
    y = (1 - a) ** 2 * (2 * a - 1) / (1 + a)
    t_star = y ** ((1 - a) / (2 * a))
    assert t_star == pytest.approx((1 / 56) ** (1 / 6))
    nl = CounterexampleF(a)
    assert nl.fprime(t_star * 0.99) > 0 > nl.fprime(t_star * 1.01)


def test_fprime_vanishes_at_zero_only_above_two_thirds():
    t = np.array([1e-8, 1e-10, 1e-12])
    assert np.all(np.abs(CounterexampleF(0.75).fprime(t)) < 1e-5)
    vals = CounterexampleF(0.6).fprime(t)
    # behaves like t^((3a-2)/(1-a)) = t^(-1/2): unbounded
    assert np.all(np.diff(vals) > 0) and vals[-1] > 1e4


def test_nonpositive_arguments_and_extreme_a():
    nl = CounterexampleF(0.999)
    assert nl.f(-1.0) == 0.0 and nl.fprime(0.0) == 0.0
    vals = nl.f(np.array([1e-6, 0.5, 1.0, 10.0]))
    assert np.all(np.isfinite(vals))


def test_zero_constant_polynomial():
    t = np.linspace(-2, 2, 7)
    assert np.all(Zero().f(t) == 0)
    assert Constant(2.5).f(1.0) == 2.5 and Constant(2.5).fprime(1.0) == 0.0
    p = Polynomial((1, -2, 3))
    np.testing.assert_allclose(p.f(t), 1 - 2 * t + 3 * t * t)
    np.testing.assert_allclose(p.fprime(t), -2 + 6 * t)
    assert isinstance(eval_f(p, 1.0), float)
    assert eval_fprime(p, 1.0) == 4.0


@given(st.floats(0.1, 5.0), st.floats(-2, 2))
def test_rescale_matches_scaling_of_solutions(c, t):
    base = Polynomial((0.3, -1.0, 0.5))
    r = rescale(base, c)
    assert r.f(t) == pytest.approx(c * base.f(c * t))
    assert r.fprime(t) == pytest.approx(c * c * base.fprime(c * t))


def test_rescale_zero_and_invalid():
    assert rescale(Zero(), 3.0) == Zero()
    with pytest.raises(DomainError):
        rescale(Constant(1.0), 0.0)
    with pytest.raises(DomainError):
        Rescaled(Constant(1.0), -1.0)


def test_invalid_counterexample_parameter():
    for a in (0.5, 1.0, 0.2):
        with pytest.raises(DomainError):
            CounterexampleF(a)


def test_parse_nonlinearity():
    assert parse_nonlinearity({"family": "zero"}) == Zero()
    assert parse_nonlinearity({"family": "constant", "lambda": "2"}) == Constant(2.0)
    assert parse_nonlinearity({"family": "polynomial", "coeffs": "1, 0,2"}) == Polynomial((1, 0, 2))
    assert parse_nonlinearity({"family": "counterexample", "a": "0.75"}) == CounterexampleF(0.75)
    with pytest.raises(DomainError):
        parse_nonlinearity({"family": "bogus"})
    with pytest.raises(DomainError):
        parse_nonlinearity({"family": "constant"})
