"""Sanity anchor: with the environment switched off everything must agree.

gamma = 0 and T = 0 turn the master equation into free Schroedinger
evolution, for which the two-slit pattern is textbook material.  The solver,
the exact closed form, and the far-field form are compared against it on a
+-3 sigma window.
"""

import numpy as np

from decofringe import (
    derive_scales,
    diagonal_profile,
    free_pattern,
    make_grid,
    natural_params,
    pattern_exact,
    pattern_weak,
)

# beta = 40: strong spreading, comfortably far field
p = natural_params(theta=0.0, beta=40.0, kappa=0.0, dtilde=8.0)
scales = derive_scales(p)
grid = make_grid(3.0 * scales.envelope_width, 1025)

ref = free_pattern(p, scales.flight_time, grid)
peak = ref.intensities.max()

candidates = {
    "solver": diagonal_profile(p, scales.flight_time, grid).intensities,
    "exact form": pattern_exact(p, grid).intensities,
    "far-field form": pattern_weak(p, grid).intensities,
}
for name, intens in candidates.items():
    dev = np.max(np.abs(intens - ref.intensities)) / peak
    print(f"{name:>15} vs free pattern: max deviation {dev:.3e} of peak")
