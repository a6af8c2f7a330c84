"""Which constant convention is right?  Ask the reference solver.

The exact screen pattern ships in two variants that differ by a factor of
two in the Gaussian width and in the contrast decay constant.  Both cannot
be correct.  The characteristic solver integrates the underlying master
equation with no closed-form input at all, so it gets to adjudicate.

Run at a deliberately unforgiving operating point: damping phase theta=0.5
(far outside the weak-coupling regime), spreading beta=5, diffusion kappa=2,
slit separation 6 packet widths, natural units.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from decofringe import (
    derive_scales,
    diagonal_profile,
    make_grid,
    natural_params,
    pattern_exact,
)

p = natural_params(theta=0.5, beta=5.0, kappa=2.0, dtilde=6.0)
t = derive_scales(p).flight_time
grid = make_grid(20.0, 2048)

ref = diagonal_profile(p, t, grid)
peak = ref.intensities.max()
print(f"solver: {ref.meta['k_points']} k-nodes, "
      f"doubling drift {ref.meta['doubling_drift']:.2e}")

fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(7.0, 5.6), sharex=True)
ax0.plot(grid, ref.intensities, "k-", lw=2.5, alpha=0.4, label="solver")
for variant, style in (("published", "C3--"), ("calibrated", "C0-")):
    prof = pattern_exact(p, grid, variant)
    dev = np.abs(prof.intensities - ref.intensities) / peak
    print(f"{variant:>11}: max deviation {dev.max():.3e} of peak")
    ax0.plot(grid, prof.intensities, style, lw=1.2, label=variant)
    ax1.semilogy(grid, np.maximum(dev, 1e-18), style, lw=1.2, label=variant)

ax0.set_ylabel("density")
ax0.legend(frameon=False)
ax1.set_xlabel("screen position (packet widths)")
ax1.set_ylabel("|deviation| / peak")
ax1.axhline(1e-6, color="gray", lw=0.8, ls=":")
fig.tight_layout()
fig.savefig("adjudicate_variants.png", dpi=150)
print("wrote adjudicate_variants.png")
