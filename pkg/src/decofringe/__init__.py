"""Double-slit interference of massive particles under collisional decoherence.

Closed-form screen patterns and fringe visibility for a particle coupled to a
high-temperature environment, cross-validated by an independent characteristic
solver of the underlying master equation (:mod:`decofringe.oracle`).  See
docs/method.md for the derivation and README.md for the CLI.
"""

from .closedform import (
    ExactPatternParams,
    InternalNumericError,
    NoFringeError,
    PatternProfile,
    envelope_factor,
    exact_pattern_params,
    fringe_maxima,
    gamma_electron_plate,
    gamma_electron_plate_si,
    make_grid,
    pattern_exact,
    pattern_exact_groups,
    pattern_weak,
    visibility_formula,
    visibility_numeric,
)
from .oracle import (
    ConvergenceError,
    OracleConfig,
    TransformedState,
    default_oracle_config,
    diagonal_profile,
    evolve_point,
    evolve_state,
    free_pattern,
    initial_transform,
    trace,
)
from .params import (
    DerivedScales,
    DimensionlessGroups,
    OverlapWarning,
    PhysicalParams,
    RatioParams,
    RegimeWarning,
    ValidationError,
    derive_scales,
    dimensionless,
    natural_params,
    ratio_groups,
    ratio_scales,
    t_ratio_of,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # parameters
    "PhysicalParams",
    "RatioParams",
    "DerivedScales",
    "DimensionlessGroups",
    "derive_scales",
    "dimensionless",
    "t_ratio_of",
    "ratio_scales",
    "ratio_groups",
    "natural_params",
    "ValidationError",
    "OverlapWarning",
    "RegimeWarning",
    # closed forms
    "ExactPatternParams",
    "PatternProfile",
    "exact_pattern_params",
    "pattern_exact",
    "pattern_exact_groups",
    "pattern_weak",
    "envelope_factor",
    "visibility_formula",
    "visibility_numeric",
    "fringe_maxima",
    "gamma_electron_plate",
    "gamma_electron_plate_si",
    "make_grid",
    "NoFringeError",
    "InternalNumericError",
    # solver
    "OracleConfig",
    "TransformedState",
    "default_oracle_config",
    "initial_transform",
    "evolve_point",
    "evolve_state",
    "diagonal_profile",
    "trace",
    "free_pattern",
    "ConvergenceError",
]
