"""Relaxation-factor primitives against their defining integrals.

Every factor is a moment of the characteristic flow, so scipy.integrate.quad
of the defining integrand is an implementation-independent reference:

    E(v)   = int_0^1 e^{v u} du
    g(th)  = 2 int_0^1 e^{-2 th u} du
    G1(th) = (1/th)  int_0^1 (e^{4 th u} - e^{2 th u}) du
    G2(th) = (1/th^2) int_0^1 (e^{2 th u} - 1)^2 du
    h(th)  = (1/4 th^2) int_0^1 (1 - e^{-2 th u})^2 du,   f = 16 th^3 h
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from decofringe.stable import (
    F_SERIES_CUT,
    G2_SERIES_CUT,
    expm1_over,
    f_theta,
    g1_theta,
    g2_theta,
    g_theta,
    h_theta,
)

# values at theta = 0 are exact limits, not special-cased approximations
EXACT_AT_ZERO = {
    expm1_over: 1.0,
    g_theta: 2.0,
    f_theta: 0.0,
    h_theta: 1.0 / 3.0,
    g1_theta: 1.0,
    g2_theta: 4.0 / 3.0,
}

THETAS = np.concatenate(
    [
        np.logspace(-9, np.log10(0.9e-2), 12),
        np.logspace(np.log10(1.2e-2), np.log10(20.0), 18),
    ]
)


def _ref(fn, theta):
    if fn is expm1_over:
        return quad(lambda u: math.exp(theta * u), 0, 1, epsabs=1e-15, epsrel=1e-13)[0]
    if fn is g_theta:
        return 2 * quad(lambda u: math.exp(-2 * theta * u), 0, 1, epsabs=1e-15, epsrel=1e-13)[0]
    if fn is g1_theta:
        if theta == 0:
            return 1.0
        # exp difference written via expm1 so the reference itself is stable
        return quad(
            lambda u: math.exp(2 * theta * u) * math.expm1(2 * theta * u),
            0, 1, epsabs=1e-300, epsrel=1e-13,
        )[0] / theta
    if fn is g2_theta:
        if theta == 0:
            return 4.0 / 3.0
        return quad(
            lambda u: (math.expm1(2 * theta * u)) ** 2, 0, 1, epsabs=1e-300, epsrel=1e-13
        )[0] / theta**2
    if fn is h_theta:
        if theta == 0:
            return 1.0 / 3.0
        return quad(
            lambda u: (-math.expm1(-2 * theta * u)) ** 2, 0, 1, epsabs=1e-300, epsrel=1e-13
        )[0] / (4 * theta**2)
    raise AssertionError


def test_values_at_zero():
    for fn, expected in EXACT_AT_ZERO.items():
        assert fn(0.0) == expected


@pytest.mark.parametrize("fn", [g_theta, g1_theta, g2_theta, h_theta])
def test_against_defining_integral(fn):
    for theta in THETAS:
        ref = _ref(fn, float(theta))
        assert fn(float(theta)) == pytest.approx(ref, rel=1e-11), f"theta={theta}"


def test_expm1_over_both_signs():
    for v in [-20.0, -1.0, -1e-8, 1e-8, 1.0, 20.0]:
        assert expm1_over(v) == pytest.approx(_ref(expm1_over, v), rel=1e-12)


def test_f_is_16_theta3_h():
    th = np.logspace(-8, 1, 40)
    np.testing.assert_allclose(f_theta(th), 16.0 * th**3 * h_theta(th), rtol=1e-13)


def test_g1_closed_form_identity():
    # (e^{4t}-1) - 2(e^{2t}-1) = (e^{2t}-1)^2 lets G1 avoid any series branch.
    # The raw left side cancels below theta ~ 1e-4, so compare above that.
    th = np.logspace(-3.5, 1.5, 50)
    lhs = g1_theta(th)
    rhs = (np.expm1(4 * th) - 2 * np.expm1(2 * th)) / (4 * th**2)
    np.testing.assert_allclose(lhs, rhs, rtol=2e-11)


@pytest.mark.parametrize(
    "fn,cut",
    [(f_theta, F_SERIES_CUT), (h_theta, F_SERIES_CUT), (g2_theta, G2_SERIES_CUT)],
)
def test_series_switch_continuity(fn, cut):
    below = fn(cut * (1.0 - 1e-12))
    above = fn(cut * (1.0 + 1e-12))
    assert abs(above - below) < 1e-10 * abs(above)


def test_array_broadcasting():
    th = np.array([[0.0, 1e-6], [1e-2, 2.0]])
    for fn in (g_theta, f_theta, h_theta, g1_theta, g2_theta):
        out = fn(th)
        assert out.shape == th.shape
        assert np.all(np.isfinite(out))


def test_monotonicity():
    # g decays from 2, h from 1/3; G1, G2 grow from 1, 4/3
    th = np.logspace(-6, 1, 30)
    assert np.all(np.diff(g_theta(th)) < 0)
    assert np.all(np.diff(h_theta(th)) < 0)
    assert np.all(np.diff(g1_theta(th)) > 0)
    assert np.all(np.diff(g2_theta(th)) > 0)
