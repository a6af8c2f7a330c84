"""Numerically stable relaxation factors of the damping phase theta = gamma*t.

Everything downstream (closed-form pattern widths, the characteristics decay
integral) reduces to a handful of scalar functions of theta that are ratios of
exponential differences.  Evaluated naively they cancel catastrophically for
small theta, so each is written in an expm1 form that is exact down to the
series switch, with a short Taylor branch below it.  Switch continuity is
pinned to < 1e-10 relative by tests.

All functions accept scalars or ndarrays and are finite at theta = 0.
"""

from __future__ import annotations

import numpy as np

# Taylor branches take over below these.  The closed forms carry a residual
# cancellation of relative size ~eps/theta^2 (7.5e-13 at the cut); the series
# truncate at ~1e-13 there, so both branches meet well inside 1e-10.
F_SERIES_CUT = 1e-2
G2_SERIES_CUT = 1e-2


def _as_array(theta):
    th = np.asarray(theta, dtype=float)
    return th, th.ndim == 0


def expm1_over(v):
    """E(v) = (e^v - 1)/v, with E(0) = 1.  Stable for all v."""
    v, scalar = _as_array(v)
    out = np.ones_like(v)
    nz = v != 0.0
    out[nz] = np.expm1(v[nz]) / v[nz]
    return float(out) if scalar else out


def g_theta(theta):
    """g(theta) = (1 - e^{-2 theta})/theta = 2*E(-2 theta);  g(0) = 2.

    Drift factor of the back-traced characteristic; no series branch needed
    because expm1 carries the full precision.
    """
    return 2.0 * expm1_over(-2.0 * np.asarray(theta, dtype=float))


def f_theta(theta):
    """f(theta) = 4 theta + 4 e^{-2 theta} - e^{-4 theta} - 3.

    Grows like (16/3) theta^3 at the origin; the three O(1) terms cancel, so
    above the cut it is evaluated as 4 theta + 2u - u^2 with u = expm1(-2
    theta) (one residual cancellation at the 4 theta^2 level, relative error
    ~eps/theta) and below the cut by its Taylor series.
    """
    th, scalar = _as_array(theta)
    out = np.empty_like(th)
    small = np.abs(th) < F_SERIES_CUT
    ts = th[small]
    out[small] = ts**3 * (
        16.0 / 3.0
        + ts * (-8.0 + ts * (112.0 / 15.0
                             + ts * (-16.0 / 3.0 + ts * (992.0 / 315.0 - ts * 1.6))))
    )
    tb = th[~small]
    u = np.expm1(-2.0 * tb)
    out[~small] = 4.0 * tb + 2.0 * u - u * u
    return float(out) if scalar else out


def h_theta(theta):
    """h(theta) = f(theta)/(16 theta^3);  h(0) = 1/3.

    Decoherence-broadening shape factor: the dimensionless spread added by
    momentum diffusion is kappa * h(theta).
    """
    th, scalar = _as_array(theta)
    out = np.empty_like(th)
    small = np.abs(th) < F_SERIES_CUT
    ts = th[small]
    out[small] = (
        1.0 / 3.0
        + ts * (-0.5 + ts * (7.0 / 15.0
                             + ts * (-1.0 / 3.0 + ts * (62.0 / 315.0 - ts * 0.1))))
    )
    tb = th[~small]
    out[~small] = f_theta(tb) / (16.0 * tb**3)
    return float(out) if scalar else out


def g1_theta(theta):
    """G1(theta) = [E(4 theta) - E(2 theta)]/theta  ==  E(2 theta)^2.

    The bracketed difference cancels, but it collapses exactly: with
    a = expm1(2 theta), e^{4 theta} - 1 = 2a + a^2, so the difference equals
    a^2/(4 theta^2).  No series branch; G1(0) = 1.
    """
    e = expm1_over(2.0 * np.asarray(theta, dtype=float))
    return e * e


def g2_theta(theta):
    """G2(theta) = [E(4 theta) - 2 E(2 theta) + 1]/theta^2;  G2(0) = 4/3.

    With a = expm1(2 theta) the numerator is (a^2 - 2a + 4 theta)/(4 theta),
    which still cancels at the 4 theta^2 level, hence the series branch.
    """
    th, scalar = _as_array(theta)
    out = np.empty_like(th)
    small = np.abs(th) < G2_SERIES_CUT
    ts = th[small]
    out[small] = (
        4.0 / 3.0
        + ts * (2.0 + ts * (28.0 / 15.0
                            + ts * (4.0 / 3.0 + ts * (248.0 / 315.0 + ts * 0.4))))
    )
    tb = th[~small]
    a = np.expm1(2.0 * tb)
    out[~small] = (a * a - 2.0 * a + 4.0 * tb) / (4.0 * tb**3)
    return float(out) if scalar else out
