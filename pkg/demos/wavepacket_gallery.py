"""
Wavepacket gallery: beating, damping, and the resonant limit
============================================================

The pair correlation g2(tau) oscillates at the generalized coupling
frequency under an envelope set by the two dressed widths.  Detuning
the coupling field speeds the beat up and slows the tail down.  Each
curve here comes from the closed form and is cross-checked against the
numeric transform of the two-pole spectrum.
"""

import numpy as np

from biphoton import (
    SystemParams,
    TimeGridConfig,
    beat_period,
    chi3_approx,
    default_frequency_grid,
    dressed_modes,
    g2_analytic,
    g2_resonant,
    psi_numeric,
    write_csv,
)

grid = TimeGridConfig(tau_max=400.0, n_points=2000)

for delta_c in (0.0, 16.7, 28.3, 45.0):
    p = SystemParams(delta_c=delta_c, omega_c=14.8)
    d = dressed_modes(p)
    wa = g2_analytic(p, grid=grid)
    wn = psi_numeric(chi3_approx(p, default_frequency_grid(p)), grid, p)
    dev = np.max(np.abs(wa.g2 - wn.g2)) / wa.g2.max()
    print(f"delta_c={delta_c:5.1f}: beat {beat_period(p):6.2f} ns, "
          f"tail rate 2*gamma-={2 * d.gamma_minus:.3f}, "
          f"closed form vs transform {dev:.1e}")
    write_csv(f"wavepacket_dc{delta_c:g}.csv",
              {"tau_ns": wa.taus, "value": wa.g2},
              {"delta_c": delta_c, "omega_c": 14.8})

# on resonance the general form must collapse to the damped Rabi shape
p0 = SystemParams(delta_c=0.0, omega_c=14.8)
gap = np.max(np.abs(g2_analytic(p0, grid=grid).g2
                    - g2_resonant(p0, grid=grid).g2))
print(f"\nresonant-limit gap: {gap:.2e} (identical by construction)")
print("wrote wavepacket_dc*.csv")
