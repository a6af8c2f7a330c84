"""Experiment parameters, derived scales, and dimensionless groups.

Two input modes are supported:

* :class:`PhysicalParams` — the full SI description of a two-slit run for a
  particle coupled to a thermal environment (friction rate gamma, temperature
  T).  Everything else derives from it.
* :class:`RatioParams` — geometry plus the decoherence ratio t_L/tau_D given
  directly, for the common case where only the ratio is known.  This mode is
  mass-free (beta = lambda_d*L/(2*pi*eps^2)) and treats the damping phase
  theta as zero, i.e. the weak-coupling idealization.

Physical constants default to CODATA values via scipy.constants and may be
overridden per-instance, which is how natural-unit (hbar = m = eps = kB = 1)
configurations are built for solver cross-checks.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from scipy import constants as _const

HBAR_SI = _const.hbar          # 1.054571817e-34 J s
BOLTZMANN_SI = _const.k        # 1.380649e-23 J/K


class ValidationError(ValueError):
    """Raised for a non-finite or out-of-range parameter; names the field."""

    def __init__(self, fieldname: str, message: str):
        self.field = fieldname
        super().__init__(f"{fieldname}: {message}")


class OverlapWarning(UserWarning):
    """Slit separation does not clear the packet widths; slits overlap."""


class RegimeWarning(UserWarning):
    """Inputs are outside a closed form's regime of validity."""


def _require(fieldname: str, value: float, *, positive: bool = True) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(fieldname, f"must be finite, got {value!r}")
    if positive and value <= 0.0:
        raise ValidationError(fieldname, f"must be > 0, got {value!r}")
    if not positive and value < 0.0:
        raise ValidationError(fieldname, f"must be >= 0, got {value!r}")
    return value


@dataclass(frozen=True)
class PhysicalParams:
    """Full SI description of a decohering double-slit run.

    Parameters
    ----------
    mass : float
        Particle mass [kg].
    slit_separation : float
        Center-to-center slit distance d [m]; packets start at +-d/2.
    packet_width : float
        Initial packet width eps [m]: amplitude envelope exp(-x^2/eps^2).
    de_broglie_wavelength : float
        lambda_d = 2*pi*hbar/p0 [m] of the longitudinal motion.
    path_length : float
        Slits-to-screen distance L [m].
    coupling_rate : float
        Momentum damping rate gamma [1/s]; 0 switches the environment off.
    temperature : float
        Environment temperature [K]; 0 likewise disables diffusion.
    hbar, boltzmann : float
        Physical constants; override only for natural-unit test setups.
    """

    mass: float
    slit_separation: float
    packet_width: float
    de_broglie_wavelength: float
    path_length: float
    coupling_rate: float
    temperature: float
    hbar: float = HBAR_SI
    boltzmann: float = BOLTZMANN_SI

    def __post_init__(self):
        _require("mass", self.mass)
        _require("slit_separation", self.slit_separation)
        _require("packet_width", self.packet_width)
        _require("de_broglie_wavelength", self.de_broglie_wavelength)
        _require("path_length", self.path_length)
        _require("coupling_rate", self.coupling_rate, positive=False)
        _require("temperature", self.temperature, positive=False)
        _require("hbar", self.hbar)
        _require("boltzmann", self.boltzmann)
        if self.slit_separation <= 2.0 * self.packet_width:
            warnings.warn(
                "slit_separation <= 2*packet_width: the slit packets overlap "
                "and the two-peaked initial state is not a clean double slit",
                OverlapWarning,
                stacklevel=3,
            )


@dataclass(frozen=True)
class RatioParams:
    """Geometry plus t_L/tau_D given directly (weak-coupling, mass-free)."""

    slit_separation: float
    packet_width: float
    de_broglie_wavelength: float
    path_length: float
    t_ratio: float

    def __post_init__(self):
        _require("slit_separation", self.slit_separation)
        _require("packet_width", self.packet_width)
        _require("de_broglie_wavelength", self.de_broglie_wavelength)
        _require("path_length", self.path_length)
        _require("t_ratio", self.t_ratio, positive=False)
        if self.slit_separation <= 2.0 * self.packet_width:
            warnings.warn(
                "slit_separation <= 2*packet_width: the slit packets overlap "
                "and the two-peaked initial state is not a clean double slit",
                OverlapWarning,
                stacklevel=3,
            )


@dataclass(frozen=True)
class DerivedScales:
    """Scales implied by a PhysicalParams set.

    flight_time
        t_L = m*L*lambda_d/(2*pi*hbar): time to traverse L at p0.
    diffusion
        D = 2*m*gamma*kB*T, momentum-diffusion coefficient of the master
        equation.
    decoherence_time
        tau_D = hbar^2/(D*d^2); +inf when gamma or T is zero.
    envelope_width
        sigma = lambda_d*L/(pi*eps), the far-field single-packet scale.
    fringe_spacing
        Lambda = lambda_d*L/d.
    """

    flight_time: float
    diffusion: float
    decoherence_time: float
    envelope_width: float
    fringe_spacing: float


@dataclass(frozen=True)
class DimensionlessGroups:
    """theta = gamma*t, beta = hbar*t/(m*eps^2), kappa = D*t^3/(m^2*eps^2),
    dtilde = d/eps, all evaluated at the flight time unless stated otherwise.
    """

    theta: float
    beta: float
    kappa: float
    dtilde: float


def derive_scales(p: PhysicalParams) -> DerivedScales:
    """Compute the derived scales for a full SI parameter set."""
    t_flight = p.mass * p.path_length * p.de_broglie_wavelength / (2.0 * math.pi * p.hbar)
    diffusion = 2.0 * p.mass * p.coupling_rate * p.boltzmann * p.temperature
    if diffusion == 0.0:
        tau_d = math.inf
    else:
        tau_d = p.hbar**2 / (diffusion * p.slit_separation**2)
    sigma = p.de_broglie_wavelength * p.path_length / (math.pi * p.packet_width)
    fringe = p.de_broglie_wavelength * p.path_length / p.slit_separation
    return DerivedScales(
        flight_time=t_flight,
        diffusion=diffusion,
        decoherence_time=tau_d,
        envelope_width=sigma,
        fringe_spacing=fringe,
    )


def dimensionless(p: PhysicalParams, s: DerivedScales) -> DimensionlessGroups:
    """Dimensionless groups at the flight time."""
    eps = p.packet_width
    t = s.flight_time
    return DimensionlessGroups(
        theta=p.coupling_rate * t,
        beta=p.hbar * t / (p.mass * eps**2),
        kappa=s.diffusion * t**3 / (p.mass**2 * eps**2),
        dtilde=p.slit_separation / eps,
    )


def t_ratio_of(p: PhysicalParams, s: DerivedScales | None = None) -> float:
    """t_L/tau_D = D*d^2*t_L/hbar^2 (0 when the environment is off)."""
    if s is None:
        s = derive_scales(p)
    return s.diffusion * p.slit_separation**2 * s.flight_time / p.hbar**2


def ratio_scales(rp: RatioParams) -> DerivedScales:
    """Scales available in ratio mode (times are not; they need a mass)."""
    sigma = rp.de_broglie_wavelength * rp.path_length / (math.pi * rp.packet_width)
    fringe = rp.de_broglie_wavelength * rp.path_length / rp.slit_separation
    return DerivedScales(
        flight_time=math.nan,
        diffusion=math.nan,
        decoherence_time=math.nan,
        envelope_width=sigma,
        fringe_spacing=fringe,
    )


def ratio_groups(rp: RatioParams) -> DimensionlessGroups:
    """Groups in ratio mode: theta = 0 and kappa chosen to realize t_ratio.

    beta = lambda_d*L/(2*pi*eps^2) is mass-free; the identity
    t_L/tau_D = kappa*dtilde^2/beta^2 then fixes kappa.
    """
    eps = rp.packet_width
    beta = rp.de_broglie_wavelength * rp.path_length / (2.0 * math.pi * eps**2)
    dtilde = rp.slit_separation / eps
    kappa = rp.t_ratio * beta**2 / dtilde**2
    return DimensionlessGroups(theta=0.0, beta=beta, kappa=kappa, dtilde=dtilde)


def natural_params(
    theta: float, beta: float, kappa: float, dtilde: float
) -> PhysicalParams:
    """PhysicalParams realizing the given groups in hbar=m=eps=kB=1 units.

    The evolution time equals beta in these units (beta = hbar*t/(m*eps^2)),
    so the construction sets lambda_d = 2*pi (unit momentum) and L = beta,
    making the flight time land on t = beta exactly.  theta = 0 forces
    kappa = 0: friction-free SI parameters cannot carry thermal diffusion.
    """
    _require("beta", beta)
    _require("dtilde", dtilde)
    _require("theta", theta, positive=False)
    _require("kappa", kappa, positive=False)
    if theta == 0.0 and kappa != 0.0:
        raise ValidationError(
            "kappa", "must be 0 when theta = 0 (no friction means no diffusion)"
        )
    gamma = theta / beta
    temperature = 0.0 if theta == 0.0 else kappa / (2.0 * theta * beta**2)
    return PhysicalParams(
        mass=1.0,
        slit_separation=dtilde,
        packet_width=1.0,
        de_broglie_wavelength=2.0 * math.pi,
        path_length=beta,
        coupling_rate=gamma,
        temperature=temperature,
        hbar=1.0,
        boltzmann=1.0,
    )
