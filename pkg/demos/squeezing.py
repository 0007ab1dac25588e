"""
Optical squeezing from an in-loop squeezer.

A squeeze-loss loop (beam splitter eta followed by single-mode squeezing z)
squeezes the steady-state optical mode below vacuum, past the 3dB level for
large eta, but destabilizes the system beyond a critical eta. The mechanical
mode never drops below vacuum anywhere on the stable grid.
"""

import numpy as np

from covarloop import (
    NoiseEnvironment,
    Regime,
    SystemParams,
    squeezing_stability_boundary,
    squeezing_sweep,
)

params = SystemParams(g_lin=1e-3, kappa=0.1, gamma_m=1e-5)
env = NoiseEnvironment.from_occupancy(nbar_l=0.0, nbar_m=100.0)
z = 1.3

eta_star = squeezing_stability_boundary(params, env, z)
print(f"weak coupling, z = {z}: stable for eta < {eta_star:.4f}\n")

etas = np.linspace(0.0, 0.638, 9)
table = squeezing_sweep(params, env, z, etas)
print(" eta      min optical eig   min mechanical eig")
for row in table.rows:
    print(f" {row['eta']:<8.3f} {row['min_opt_eig']:<17.4f} {row['min_mech_eig']:.4f}")

crossed = [r["eta"] for r in table.rows if r["min_opt_eig"] < 0.5]
print(f"\n3dB limit (eigenvalue 1/2) crossed for eta >= {min(crossed):.3f}" if crossed
      else "\n3dB limit not crossed on this grid")

# Strong coupling variant: the full linearized model with larger z.
strong = SystemParams(g_lin=0.2, kappa=0.05, gamma_m=1e-4, regime=Regime.FULL, delta=-1.0)
eta_strong = squeezing_stability_boundary(strong, env, 1.5)
print(f"strong coupling, z = 1.5: stable for eta < {eta_strong:.4f}")
