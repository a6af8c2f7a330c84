"""Closed-form screen patterns and fringe visibility.

The exact diagonal of the evolved density matrix is a three-term Gaussian
expression: two direct packets at +-x0 = +-d/2 and an oscillatory cross term
whose amplitude carries the decoherence suppression.  In units of the packet
width eps (xt = x/eps, x0t = d/(2*eps)) it reads

    rho(xt) = (1/(sqrt(pi)*Om)) * [ 0.5*exp(-(xt-x0t)^2/Om^2)
                                  + 0.5*exp(-(xt+x0t)^2/Om^2)
                                  + exp(-(xt^2+x0t^2)/Om^2) * Cdec * cos(c*xt) ]

with Om^2, Cdec, and c given by one of two constant conventions:

``calibrated`` (default)
    Om^2 = (1 + beta^2 g^2)/2 + Gamma,  Cdec = exp(-2*Gamma*x0t^2/Om^2).
    Derived by the method of characteristics (docs/method.md) and validated
    against the independent solver in :mod:`decofringe.oracle` to machine
    precision; reproduces |psi(x,0)|^2 at t=0, textbook free spreading, and
    conserves the trace exactly.

``published``
    Om^2 = 1 + beta^2 g^2 + Gamma,  Cdec = exp(-Gamma*x0t^2/Om^2).
    A convention in circulation whose free-limit width is a factor sqrt(2)
    too wide; kept selectable so the solver comparison can quantify it.

Both share g = (1-e^{-2 theta})/theta, Gamma = kappa*f(theta)/(16 theta^3),
and cosine coefficient c = dtilde*beta*g/Om^2.

The weak-coupling (far-field) form keeps the conventional visibility constant
exp(-t_L/(24 tau_D)) of the three-term pattern literature; the exact
calibrated solution decoheres twice as fast (exponent t_L/(12 tau_D)), which
the solver comparison in the tests demonstrates.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, fields as dataclass_fields
from datetime import datetime, timezone
from typing import Union

import numpy as np
from scipy import constants as _const

from .params import (
    DimensionlessGroups,
    PhysicalParams,
    RatioParams,
    RegimeWarning,
    ValidationError,
    derive_scales,
    dimensionless,
    ratio_groups,
    ratio_scales,
    t_ratio_of,
)
from .stable import g_theta, h_theta

Params = Union[PhysicalParams, RatioParams]

VARIANTS = ("published", "calibrated")
DEFAULT_VARIANT = "calibrated"
DEFAULT_GRID_POINTS = 4096
DEFAULT_SPAN_SIGMA = 4.0

# Conventional visibility-decay constant of the far-field pattern; the exact
# solution's weak limit is 12 (see module docstring and tests).
WEAK_ENVELOPE_CONSTANT = 24.0

THETA_WEAK_WARN = 1e-2
SIGMA_OVER_EPS_WARN = 10.0

# no-fringe classification threshold on (Imax-Imin)/(Imax+Imin)
CONTRAST_FLOOR = 1e-12


class NoFringeError(Exception):
    """Profile carries no measurable fringe at the requested index."""


class InternalNumericError(Exception):
    """A computation produced non-finite values from valid inputs."""


@dataclass(frozen=True)
class ExactPatternParams:
    """Dimensionless constants of the exact pattern at one time.

    gamma_big = Gamma/eps^2 >= 0 is the diffusion-induced broadening,
    omega_sq = Omega^2/eps^2 the total squared width, cos_coeff the fringe
    wavenumber in units of 1/eps.
    """

    gamma_big: float
    omega_sq: float
    cos_coeff: float


class PatternProfile:
    """Screen profile: strictly increasing positions and intensities.

    Intensities are a probability density (1/m in SI mode); `meta` carries the
    source tag ("exact" | "weak" | "oracle"), a parameter echo, and a creation
    timestamp.  Arrays are locked read-only.
    """

    def __init__(self, positions, intensities, meta: dict):
        positions = np.asarray(positions, dtype=float)
        intensities = np.asarray(intensities, dtype=float)
        if positions.ndim != 1 or positions.shape != intensities.shape:
            raise ValidationError("positions", "positions/intensities must be equal-length 1-d arrays")
        if positions.size < 2 or not np.all(np.diff(positions) > 0.0):
            raise ValidationError("positions", "must be strictly increasing")
        if not np.isfinite(intensities).all():
            raise InternalNumericError("non-finite intensity values")
        floor = -1e-12 * max(float(np.abs(intensities).max()), 1.0)
        if intensities.min() < floor:
            raise InternalNumericError(
                f"negative intensity {intensities.min():.3e} below noise floor"
            )
        positions.flags.writeable = False
        intensities.flags.writeable = False
        self.positions = positions
        self.intensities = intensities
        self.meta = meta

    def __len__(self):
        return self.positions.size


def make_grid(half_span: float, points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    if not (points >= 16):
        raise ValidationError("grid_points", f"must be >= 16, got {points}")
    if not (half_span > 0 and math.isfinite(half_span)):
        raise ValidationError("grid_span", f"must be > 0 and finite, got {half_span}")
    return np.linspace(-half_span, half_span, int(points))


def _resolve(p: Params):
    """(groups, scales, eps, x0, t_ratio, theta-known?) for either mode."""
    if isinstance(p, PhysicalParams):
        s = derive_scales(p)
        g = dimensionless(p, s)
        return g, s, p.packet_width, p.slit_separation / 2.0, t_ratio_of(p, s)
    if isinstance(p, RatioParams):
        s = ratio_scales(p)
        g = ratio_groups(p)
        return g, s, p.packet_width, p.slit_separation / 2.0, p.t_ratio
    raise ValidationError("params", f"expected PhysicalParams or RatioParams, got {type(p).__name__}")


def _meta(source: str, p: Params, extra: dict | None = None) -> dict:
    echo = {f.name: getattr(p, f.name) for f in dataclass_fields(p)}
    meta = {
        "source": source,
        "mode": "si" if isinstance(p, PhysicalParams) else "ratio",
        "params": echo,
        "created_utc": datetime.now(timezone.utc).isoformat(),
    }
    if extra:
        meta.update(extra)
    return meta


def exact_pattern_params(
    groups: DimensionlessGroups, variant: str = DEFAULT_VARIANT
) -> ExactPatternParams:
    """Constants of the exact pattern for the given dimensionless groups."""
    if variant not in VARIANTS:
        raise ValidationError("variant", f"must be one of {VARIANTS}, got {variant!r}")
    th, beta, kappa = groups.theta, groups.beta, groups.kappa
    if th < 0:
        raise ValidationError("theta", "must be >= 0")
    if kappa < 0:
        raise ValidationError("kappa", "must be >= 0")
    g = g_theta(th)
    gamma_big = kappa * h_theta(th)
    free_sq = 1.0 + beta**2 * g**2
    if variant == "published":
        omega_sq = free_sq + gamma_big
    else:
        omega_sq = 0.5 * free_sq + gamma_big
    cos_coeff = groups.dtilde * beta * g / omega_sq
    return ExactPatternParams(gamma_big=gamma_big, omega_sq=omega_sq, cos_coeff=cos_coeff)


def _exact_core(groups: DimensionlessGroups, xt: np.ndarray, variant: str) -> np.ndarray:
    """Dimensionless intensity rho~(xt); SI density is rho~(x/eps)/eps."""
    c = exact_pattern_params(groups, variant)
    x0t = groups.dtilde / 2.0
    decay_power = 1.0 if variant == "published" else 2.0
    cross_amp = math.exp(-decay_power * c.gamma_big * x0t**2 / c.omega_sq)
    om2 = c.omega_sq
    pref = 1.0 / math.sqrt(math.pi * om2)
    rho = pref * (
        0.5 * np.exp(-((xt - x0t) ** 2) / om2)
        + 0.5 * np.exp(-((xt + x0t) ** 2) / om2)
        + np.exp(-(xt**2 + x0t**2) / om2) * cross_amp * np.cos(c.cos_coeff * xt)
    )
    return rho


def pattern_exact_groups(
    groups: DimensionlessGroups,
    packet_width: float = 1.0,
    grid: np.ndarray | None = None,
    variant: str = DEFAULT_VARIANT,
    meta: dict | None = None,
) -> PatternProfile:
    """Exact pattern straight from dimensionless groups (natural units).

    `grid` is in the same length unit as `packet_width`; default spans
    +-4*max(Omega, dtilde) packet widths.
    """
    c = exact_pattern_params(groups, variant)
    if grid is None:
        span = DEFAULT_SPAN_SIGMA * packet_width * max(math.sqrt(c.omega_sq), groups.dtilde)
        grid = make_grid(span)
    xt = np.asarray(grid, dtype=float) / packet_width
    rho = _exact_core(groups, xt, variant) / packet_width
    if not np.isfinite(rho).all():
        raise InternalNumericError("pattern_exact produced non-finite values")
    base = {
        "variant": variant,
        "groups": {
            "theta": groups.theta,
            "beta": groups.beta,
            "kappa": groups.kappa,
            "dtilde": groups.dtilde,
        },
        "source": "exact",
        "created_utc": datetime.now(timezone.utc).isoformat(),
    }
    if meta:
        base.update(meta)
    return PatternProfile(grid, rho, base)


def pattern_exact(
    p: Params, grid: np.ndarray | None = None, variant: str = DEFAULT_VARIANT
) -> PatternProfile:
    """Exact three-term pattern at the flight time.

    In ratio mode theta is taken as 0 with kappa realizing t_L/tau_D (the
    weak-coupling idealization of the same closed form).
    """
    groups, scales, eps, _x0, _s = _resolve(p)
    if grid is None:
        grid = make_grid(DEFAULT_SPAN_SIGMA * scales.envelope_width)
    prof = pattern_exact_groups(groups, eps, grid, variant)
    prof.meta.update(_meta("exact", p, {"variant": variant}))
    return prof


def _warn_regime(theta: float | None, sigma: float, eps: float) -> None:
    if theta is not None and theta > THETA_WEAK_WARN:
        warnings.warn(
            f"damping phase theta = {theta:.3g} > {THETA_WEAK_WARN:g}: outside "
            "the weak-coupling regime of the far-field form",
            RegimeWarning,
            stacklevel=3,
        )
    if sigma < SIGMA_OVER_EPS_WARN * eps:
        warnings.warn(
            f"envelope width sigma = {sigma:.3g} < {SIGMA_OVER_EPS_WARN:g}*packet_width: "
            "the far-field (spreading-dominated) assumption is marginal",
            RegimeWarning,
            stacklevel=3,
        )


def pattern_weak(p: Params, grid: np.ndarray | None = None) -> PatternProfile:
    """Far-field pattern with the conventional exp(-t_ratio/24) visibility.

    Direct packet width is the true far-field value W = sigma/sqrt(2) of an
    exp(-x^2/eps^2) amplitude packet, fringe wavenumber 2*pi*d/(lambda_d*L)
    (spacing lambda_d*L/d).  Out-of-regime inputs return a result with a
    RegimeWarning attached, never silently.
    """
    groups, scales, eps, x0, s_ratio = _resolve(p)
    sigma = scales.envelope_width
    theta = groups.theta if isinstance(p, PhysicalParams) else None
    _warn_regime(theta, sigma, eps)
    if grid is None:
        grid = make_grid(DEFAULT_SPAN_SIGMA * sigma)
    x = np.asarray(grid, dtype=float)
    w2 = 0.5 * sigma**2
    env = envelope_factor(s_ratio)
    c = 2.0 * math.pi / scales.fringe_spacing
    rho = (1.0 / math.sqrt(math.pi * w2)) * (
        0.5 * np.exp(-((x - x0) ** 2) / w2)
        + 0.5 * np.exp(-((x + x0) ** 2) / w2)
        + np.exp(-(x**2 + x0**2) / w2) * env * np.cos(c * x)
    )
    if not np.isfinite(rho).all():
        raise InternalNumericError("pattern_weak produced non-finite values")
    return PatternProfile(x, rho, _meta("weak", p, {"t_ratio": s_ratio}))


def envelope_factor(t_ratio: float) -> float:
    """Fringe-contrast suppression exp(-t_ratio/24); t_ratio = t_L/tau_D >= 0."""
    t_ratio = float(t_ratio)
    if not math.isfinite(t_ratio) or t_ratio < 0.0:
        raise ValidationError("t_ratio", f"must be finite and >= 0, got {t_ratio!r}")
    return math.exp(-t_ratio / WEAK_ENVELOPE_CONSTANT)


def visibility_formula(p: Params, fringe_index: int = 0) -> float:
    """Closed-form visibility at the n-th fringe center x_n = n*Lambda.

    V = exp(-t_ratio/24) / cosh(2 x_n x0 / sigma^2), in [0, 1]; the cosh
    accounts for the unequal direct-packet weights away from the axis.
    """
    groups, scales, eps, x0, s_ratio = _resolve(p)
    theta = groups.theta if isinstance(p, PhysicalParams) else None
    _warn_regime(theta, scales.envelope_width, eps)
    n = int(fringe_index)
    x_n = n * scales.fringe_spacing
    v = envelope_factor(s_ratio) / math.cosh(2.0 * x_n * x0 / scales.envelope_width**2)
    return v


def _parabolic_value(y: np.ndarray, i: int) -> float:
    """Extremum value refined by a 3-point parabola through i-1, i, i+1."""
    a, b, c = y[i - 1], y[i], y[i + 1]
    denom = c - 2.0 * b + a
    if denom == 0.0:
        return float(b)
    return float(b - (c - a) ** 2 / (8.0 * denom))


def _parabolic_position(x: np.ndarray, y: np.ndarray, i: int) -> float:
    a, b, c = y[i - 1], y[i], y[i + 1]
    denom = a - 2.0 * b + c
    if denom == 0.0:
        return float(x[i])
    return float(x[i] + 0.5 * (a - c) / denom * (x[i] - x[i - 1]))


def _local_extrema(y: np.ndarray):
    """Indices of interior local maxima and minima, plateau-safe.

    An even profile on a symmetric grid can land two bitwise-equal samples at
    a crest; sign changes of the first difference (zeros forward-filled) find
    it where a strict three-point comparison goes blind.  A plateau reports
    its last sample.
    """
    d = np.sign(np.diff(y))
    idx = np.arange(d.size)
    last_nonzero = np.maximum.accumulate(np.where(d != 0.0, idx, -1))
    filled = np.where(last_nonzero >= 0, d[np.clip(last_nonzero, 0, None)], 0.0)
    pos = np.nonzero(filled[:-1] * filled[1:] < 0)[0] + 1
    maxima = pos[filled[pos - 1] > 0]
    minima = pos[filled[pos - 1] < 0]
    return maxima, minima


def fringe_maxima(profile: PatternProfile) -> np.ndarray:
    """Sub-sample positions of all interior local maxima, left to right."""
    maxima, _ = _local_extrema(profile.intensities)
    return np.array(
        [_parabolic_position(profile.positions, profile.intensities, i) for i in maxima]
    )


def visibility_numeric(profile: PatternProfile, fringe_index: int = 0) -> float:
    """(Imax - Imin)/(Imax + Imin) at the n-th maximum right of center.

    Locates the local maximum nearest x = 0, steps `fringe_index` maxima to
    the right, pairs it with the adjacent minimum (right side preferred), and
    refines both extremum values parabolically.  Raises NoFringeError when the
    profile has no usable extremum pair or the contrast is below 1e-12 —
    callers that tabulate treat that as a value, not a failure.  Assumes the
    profile resolves each fringe with >= 8 samples.
    """
    y = profile.intensities
    x = profile.positions
    maxima, minima = _local_extrema(y)
    if maxima.size == 0:
        raise NoFringeError("no interior local maximum (envelope-dominated profile)")
    center = maxima[np.abs(x[maxima]).argmin()]
    pos = np.searchsorted(maxima, center) + int(fringe_index)
    if pos < 0 or pos >= maxima.size:
        raise NoFringeError(f"fringe index {fringe_index} beyond available maxima")
    i_max = maxima[pos]
    right = minima[minima > i_max]
    left = minima[minima < i_max]
    if right.size:
        i_min = right[0]
    elif left.size:
        i_min = left[-1]
    else:
        raise NoFringeError("no local minimum adjacent to the requested maximum")
    if abs(int(i_min) - int(i_max)) < 4:
        raise NoFringeError("fringe under-resolved (< 8 samples per period)")
    v_max = _parabolic_value(y, i_max)
    v_min = _parabolic_value(y, i_min)
    total = v_max + v_min
    if total <= 0.0 or (v_max - v_min) < CONTRAST_FLOOR * total:
        raise NoFringeError(f"contrast below {CONTRAST_FLOOR:g}")
    return (v_max - v_min) / total


def gamma_electron_plate(resistivity, mass, distance, charge) -> float:
    """Electron-above-a-resistive-plate damping rate, e^2 rho / (32 pi m z^3).

    Gaussian-unit expression: resistivity in seconds, mass in grams, distance
    in centimeters, charge in esu; returns 1/s.  (The combination e^2*rho is
    unit-convention invariant, so coherent SI inputs give the same number —
    see gamma_electron_plate_si.)
    """
    resistivity = _require_pos("resistivity", resistivity)
    mass = _require_pos("mass", mass)
    distance = _require_pos("distance", distance)
    charge = float(charge)
    if charge == 0.0 or not math.isfinite(charge):
        raise ValidationError("charge", "must be finite and nonzero")
    return charge**2 * resistivity / (32.0 * math.pi * mass * distance**3)


def gamma_electron_plate_si(resistivity, mass, distance, charge=_const.e) -> float:
    """SI version: resistivity in ohm*m, mass kg, distance m, charge C.

    Converting the Gaussian expression means e^2 -> e^2/(4 pi eps0) and
    rho -> 4 pi eps0 * rho; the factors cancel, so the arithmetic is identical
    and dimensionally exact (J*s per kg*m^2 = 1/s).  Spelled out anyway so the
    unit bookkeeping is visible.
    """
    e_sq_gauss = float(charge) ** 2 / (4.0 * math.pi * _const.epsilon_0)
    rho_gauss = 4.0 * math.pi * _const.epsilon_0 * float(resistivity)
    return gamma_electron_plate(rho_gauss, mass, distance, math.sqrt(e_sq_gauss))


def _require_pos(name: str, v) -> float:
    v = float(v)
    if not math.isfinite(v) or v <= 0.0:
        raise ValidationError(name, f"must be finite and > 0, got {v!r}")
    return v
