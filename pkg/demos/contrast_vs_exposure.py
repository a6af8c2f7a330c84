"""Fringe contrast vs decoherence exposure for a cold-beam double slit.

Reference geometry: 0.1 um packets emerging from slits 1 um apart, a 5 pm
de Broglie wavelength, and a 0.2 m flight path.  The only knob is the
exposure ratio t_L / tau_D (flight time over decoherence time); we render
the screen pattern at 4, 20, and 60 and watch the fringes die while the
envelope stays put.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from decofringe import (
    RatioParams,
    fringe_maxima,
    make_grid,
    pattern_weak,
    visibility_formula,
    visibility_numeric,
)

SLIT_SEPARATION = 1.0e-6   # m
PACKET_WIDTH = 1.0e-7      # m
WAVELENGTH = 5.0e-12       # m
PATH_LENGTH = 0.2          # m
EXPOSURES = (4.0, 20.0, 60.0)

grid = make_grid(6.0e-6, 4096)
fig, ax = plt.subplots(figsize=(7.0, 4.2))

print(f"{'t_L/tau_D':>10} {'V (formula)':>12} {'V (pattern)':>12} {'spacing um':>11}")
for s_ratio in EXPOSURES:
    p = RatioParams(SLIT_SEPARATION, PACKET_WIDTH, WAVELENGTH, PATH_LENGTH, s_ratio)
    prof = pattern_weak(p, grid)
    peaks = fringe_maxima(prof)
    spacing = np.median(np.diff(peaks[np.abs(peaks) < 5.0e-6]))
    v_num = visibility_numeric(prof)
    v_for = visibility_formula(p)
    print(f"{s_ratio:>10.0f} {v_for:>12.4f} {v_num:>12.4f} {spacing * 1e6:>11.4f}")
    ax.plot(prof.positions * 1e6, prof.intensities * 1e-6,
            label=f"$t_L/\\tau_D = {s_ratio:.0f}$")

ax.set_xlabel("screen position (um)")
ax.set_ylabel("probability density (1/um)")
ax.set_title("Fringe washout at fixed envelope")
ax.legend(frameon=False)
fig.tight_layout()
fig.savefig("contrast_vs_exposure.png", dpi=150)
print("wrote contrast_vs_exposure.png")
