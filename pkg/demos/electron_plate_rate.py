"""How close can an electron beam fly past a resistive plate?

An electron at height z above a plate of resistivity rho feels ohmic
friction at rate gamma = e^2 rho / (32 pi m z^3) from the dissipative image
charge.  Feeding that rate into the fringe-contrast formula for the
reference interferometer (1 um slits, 5 pm beam, 0.2 m flight at room
temperature) says at what height the plate starts to erase the pattern.
"""

import math
from dataclasses import replace

from decofringe import (
    PhysicalParams,
    gamma_electron_plate_si,
    t_ratio_of,
    visibility_formula,
)

RHO_COPPER = 1.68e-8     # ohm m
RHO_SILICON = 6.4e2      # ohm m, intrinsic
M_E = 9.1093837139e-31   # kg

beam = PhysicalParams(
    mass=M_E,
    slit_separation=1.0e-6,
    packet_width=1.0e-7,
    de_broglie_wavelength=5.0e-12,
    path_length=0.2,
    coupling_rate=1.0,          # placeholder, swapped per height below
    temperature=300.0,
)

print("copper plate:")
print(f"{'z (nm)':>8} {'gamma (1/s)':>12} {'V':>8}")
for z_nm in (30, 50, 80, 120, 200, 400):
    gamma = gamma_electron_plate_si(RHO_COPPER, M_E, z_nm * 1e-9)
    v = visibility_formula(replace(beam, coupling_rate=gamma))
    print(f"{z_nm:>8d} {gamma:>12.4g} {v:>8.4f}")

# height where half the contrast is gone: exposure ratio is linear in the
# rate, so invert V = exp(-ratio/24) and the 1/z^3 law directly
gamma_half = 24.0 * math.log(2.0) / t_ratio_of(beam)  # beam has unit rate
print()
for label, rho in (("copper", RHO_COPPER), ("intrinsic silicon", RHO_SILICON)):
    z_ref = 1.0e-7
    z_half = z_ref * (gamma_electron_plate_si(rho, M_E, z_ref) / gamma_half) ** (1.0 / 3.0)
    print(f"half contrast over {label:<17} at z = {z_half * 1e6:8.3f} um")
