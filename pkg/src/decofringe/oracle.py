"""Independent semi-analytic solver for the open-system double slit.

Cross-check for :mod:`decofringe.closedform`, built deliberately on a
different route: Fourier-transform the density matrix over the center
coordinate R = x + x', which turns the high-temperature master equation

    dp/dt = (i hbar / 2m)(d^2_x - d^2_x') p
            - gamma (x - x')(d_x - d_x') p
            - (D / 4 hbar^2)(x - x')^2 p,      D = 2 m gamma kB T,

into a first-order transport equation in the relative coordinate r = x - x'
that is solved exactly along characteristics.  Writing theta = gamma * t, a
point (k, r) traces back to

    r0 = r e^{-2 theta} - (hbar t / m) g(theta) k,   g = (1 - e^{-2 theta})/theta,

and the accumulated decay is an explicit quadrature of r(s)^2 along the
characteristic (closed forms in :mod:`decofringe.stable`):

    I = r0^2 t E(4 theta) + 2 r0 (hbar k / m) t^2 G1(theta)
        + (hbar k / m)^2 t^3 G2(theta),
    rho~(k, r, t) = rho~0(k, r0) * exp(-(D / 4 hbar^2) I).

The screen profile is the inverse transform on the diagonal,
P(x, t) = (1/2pi) Integral dk e^{2ikx} rho~(k, 0, t), done by trapezoid with
a node-doubling convergence check.  No ingredient of the closed-form pattern
(its width, fringe, or decay constants) is reused here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .closedform import PatternProfile
from .params import PhysicalParams, ValidationError
from .stable import expm1_over, g1_theta, g2_theta, g_theta

THETA_MAX = 50.0  # e^{-2 theta} underflows usefully long before this

IMAG_RESIDUE_TOL = 1e-10


class ConvergenceError(Exception):
    """Quadrature failed its node-doubling self-check."""


@dataclass(frozen=True)
class OracleConfig:
    """Trapezoid settings for the k-integral.

    k nodes are uniform on [-k_max, k_max].  Defaults are chosen by
    default_oracle_config from the packet width and screen extent; rel_tol is
    the allowed node-doubling drift, chunk the number of screen points
    processed per block (memory only, not results).
    """

    k_max: float
    k_points: int = 16385
    rel_tol: float = 1e-8
    chunk: int = 256

    def __post_init__(self):
        if not (self.k_max > 0 and math.isfinite(self.k_max)):
            raise ValidationError("k_max", f"must be finite and > 0, got {self.k_max!r}")
        if self.k_points < 129:
            raise ValidationError("k_points", f"must be >= 129, got {self.k_points}")
        if not (0 < self.rel_tol < 1):
            raise ValidationError("rel_tol", f"must be in (0, 1), got {self.rel_tol!r}")
        if self.chunk < 1:
            raise ValidationError("chunk", f"must be >= 1, got {self.chunk}")


def default_oracle_config(p: PhysicalParams, x_max: float) -> OracleConfig:
    """Config resolving the initial k-support and the fastest screen phase.

    k_max = 12/eps covers exp(-eps^2 k^2 / 2) beyond 10 sigma (the support
    only narrows with time); spacing <= pi/(8 x_max) gives >= 8 nodes per
    cos(2 k x_max) period before the doubling check even runs.
    """
    eps = p.packet_width
    x_max = abs(float(x_max))
    if x_max <= 0:
        raise ValidationError("x_max", "grid must have nonzero extent")
    k_max = 12.0 / eps
    spacing = math.pi / (8.0 * x_max)
    n_min = max(2049, int(math.ceil(2.0 * k_max / spacing)) + 1)
    # round node count up to 2^j + 1 so doubled grids nest
    k_points = (1 << max(11, (n_min - 2).bit_length())) + 1
    if k_points > (1 << 24) + 1:
        raise ValidationError("x_max", "screen extent requires an impractical k grid")
    return OracleConfig(k_max=k_max, k_points=k_points)


@dataclass(frozen=True)
class TransformedState:
    """rho~(k, r) sampled on broadcastable k, r arrays at one time."""

    k: np.ndarray
    r: np.ndarray
    time: float
    values: np.ndarray


def initial_transform(p: PhysicalParams, k, r) -> np.ndarray:
    """Center-coordinate Fourier transform of the two-slit initial state.

    Symmetric superposition of normalized packets (amplitude width eps)
    centered at +-d/2; real, even in k and in r.  Trace = rho~(0,0)/2
    = 1 + exp(-d^2/2 eps^2) — the packet overlap is deliberately not
    renormalized away.
    """
    k = np.asarray(k, dtype=float)
    r = np.asarray(r, dtype=float)
    eps, d = p.packet_width, p.slit_separation
    e2 = eps * eps
    return np.exp(-0.5 * e2 * k * k) * (
        2.0 * np.cos(k * d) * np.exp(-r * r / (2.0 * e2))
        + np.exp(-((r - d) ** 2) / (2.0 * e2))
        + np.exp(-((r + d) ** 2) / (2.0 * e2))
    )


def _check_time(p: PhysicalParams, t: float) -> float:
    t = float(t)
    if t < 0 or not math.isfinite(t):
        raise ValidationError("time", f"must be finite and >= 0, got {t!r}")
    theta = p.coupling_rate * t
    if theta > THETA_MAX:
        raise ValidationError(
            "time", f"gamma*t = {theta:.3g} exceeds {THETA_MAX:g}; overdamped regime not supported"
        )
    return t


def evolve_point(p: PhysicalParams, k, r, t: float) -> np.ndarray:
    """rho~(k, r, t) by characteristic backtrace; k, r broadcastable arrays."""
    t = _check_time(p, t)
    k = np.asarray(k, dtype=float)
    r = np.asarray(r, dtype=float)
    theta = p.coupling_rate * t
    hbar_t_over_m = p.hbar * t / p.mass
    r0 = r * math.exp(-2.0 * theta) - hbar_t_over_m * g_theta(theta) * k
    diffusion = 2.0 * p.mass * p.coupling_rate * p.boltzmann * p.temperature
    if diffusion == 0.0:
        return initial_transform(p, k, r0)
    vk = hbar_t_over_m * k
    decay_integral = t * (
        r0 * r0 * expm1_over(4.0 * theta)
        + 2.0 * r0 * vk * g1_theta(theta)
        + vk * vk * g2_theta(theta)
    )
    return initial_transform(p, k, r0) * np.exp(
        -(diffusion / (4.0 * p.hbar**2)) * decay_integral
    )


def evolve_state(p: PhysicalParams, k, r, t: float) -> TransformedState:
    k = np.asarray(k, dtype=float)
    r = np.asarray(r, dtype=float)
    return TransformedState(k=k, r=r, time=float(t), values=evolve_point(p, k, r, t))


def trace(p: PhysicalParams, t: float) -> float:
    """Tr rho(t) = rho~(0, 0, t)/2; constant in t to the last bit."""
    return float(evolve_point(p, 0.0, 0.0, t)) / 2.0


def _diag_trapezoid(
    p: PhysicalParams, t: float, x: np.ndarray, k_max: float, k_points: int, chunk: int
):
    """(profile, imag residue) of (1/2pi) Integral dk e^{2ikx} rho~(k,0,t)."""
    k = np.linspace(-k_max, k_max, k_points)
    dk = k[1] - k[0]
    weights = np.full(k_points, dk)
    weights[0] = weights[-1] = 0.5 * dk
    f_k = weights * evolve_point(p, k, 0.0, t) / (2.0 * math.pi)
    # cap the phase-matrix block at ~2^22 complex entries (64 MiB) so huge
    # k grids cannot blow memory regardless of chunk
    rows = min(chunk, max(1, (1 << 22) // k_points))
    out = np.empty(x.size)
    worst_imag = 0.0
    for i0 in range(0, x.size, rows):
        xs = x[i0 : i0 + rows]
        block = np.exp(2.0j * np.outer(xs, k)) * f_k
        vals = block.sum(axis=1)
        out[i0 : i0 + rows] = vals.real
        worst_imag = max(worst_imag, float(np.abs(vals.imag).max()))
    return out, worst_imag


def diagonal_profile(
    p: PhysicalParams,
    t: float,
    grid: np.ndarray,
    config: OracleConfig | None = None,
) -> PatternProfile:
    """Screen probability density on `grid` at time t.

    Runs the trapezoid at k_points nodes and again at 2(k_points - 1) + 1; raises
    ConvergenceError if the two disagree beyond config.rel_tol (relative to
    the profile peak).  The returned profile is the finer one.
    """
    t = _check_time(p, t)
    x = np.asarray(grid, dtype=float)
    if x.ndim != 1 or x.size < 2 or not np.all(np.diff(x) > 0):
        raise ValidationError("grid", "must be a strictly increasing 1-d array")
    x_max = float(np.abs(x).max())
    if config is None:
        config = default_oracle_config(p, x_max)
    if config.k_max * p.packet_width < 10.0:
        raise ValidationError(
            "k_max", f"k_max*packet_width = {config.k_max * p.packet_width:.3g} < 10"
        )
    spacing = 2.0 * config.k_max / (config.k_points - 1)
    if x_max > 0 and spacing > math.pi / (4.0 * x_max):
        raise ValidationError(
            "k_points",
            f"k spacing {spacing:.3g} too coarse for screen extent {x_max:.3g} "
            f"(need <= {math.pi / (4.0 * x_max):.3g})",
        )
    coarse, _ = _diag_trapezoid(p, t, x, config.k_max, config.k_points, config.chunk)
    fine, imag_res = _diag_trapezoid(
        p, t, x, config.k_max, 2 * (config.k_points - 1) + 1, config.chunk
    )
    scale = float(np.abs(fine).max())
    if scale <= 0:
        raise ConvergenceError("profile is identically zero on the requested grid")
    drift = float(np.abs(fine - coarse).max()) / scale
    if drift > config.rel_tol:
        raise ConvergenceError(
            f"node doubling moved the profile by {drift:.3e} (> {config.rel_tol:g}); "
            "raise k_points or shrink the grid"
        )
    if imag_res > IMAG_RESIDUE_TOL * scale:
        raise ConvergenceError(
            f"imaginary residue {imag_res:.3e} exceeds {IMAG_RESIDUE_TOL:g} of peak; "
            "transform symmetry broken"
        )
    # tiny negative troughs from quadrature noise: clip within the documented
    # -1e-10*peak floor, keep anything worse so the profile check trips
    floor = -1e-10 * scale
    cleaned = np.where((fine < 0) & (fine >= floor), 0.0, fine)
    meta = {
        "source": "oracle",
        "time": t,
        "k_points": 2 * (config.k_points - 1) + 1,
        "k_max": config.k_max,
        "doubling_drift": drift,
    }
    return PatternProfile(x, cleaned, meta)


def free_pattern(p: PhysicalParams, t: float, grid: np.ndarray) -> PatternProfile:
    """Textbook free two-packet reference (gamma = D = 0 closed form).

    With tau = 2 hbar t / (m eps^2) and S^2 = eps^2 (1 + tau^2):

        P = (1 / (sqrt(2 pi) eps sqrt(1 + tau^2)))
            * [ e^{-2(x-x0)^2/S^2} + e^{-2(x+x0)^2/S^2}
                + 2 e^{-2(x^2+x0^2)/S^2} cos(4 tau x x0 / S^2) ].

    Integrates to 1 + e^{-d^2/2 eps^2}, same (unrenormalized) trace
    convention as the solver.
    """
    t = float(t)
    x = np.asarray(grid, dtype=float)
    eps, x0 = p.packet_width, p.slit_separation / 2.0
    tau = 2.0 * p.hbar * t / (p.mass * eps * eps)
    s2 = eps * eps * (1.0 + tau * tau)
    norm = 1.0 / (math.sqrt(2.0 * math.pi) * eps * math.sqrt(1.0 + tau * tau))
    rho = norm * (
        np.exp(-2.0 * (x - x0) ** 2 / s2)
        + np.exp(-2.0 * (x + x0) ** 2 / s2)
        + 2.0 * np.exp(-2.0 * (x * x + x0 * x0) / s2) * np.cos(4.0 * tau * x * x0 / s2)
    )
    meta = {"source": "free", "time": t}
    return PatternProfile(x, rho, meta)
