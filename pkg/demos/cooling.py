"""
Sideband cooling with a passive coherent feedback loop.

Scans the loop transmission a at fixed coupling, compares the Lyapunov
steady state with the closed-form mechanical eigenvalue, and prints the
analytic optimum (b = 0, kappa_eff = 2G, i.e. a = 1 - G/kappa).
"""

import numpy as np

from covarloop import (
    NoiseEnvironment,
    SystemParams,
    assemble,
    cooling_sigma_cf,
    lyapunov_steady_state,
    mean_occupancy,
    optimize_cooling_weak,
    passive_loop,
    sigma_m_opt,
)

params = SystemParams(g_lin=1e-3, kappa=0.1, gamma_m=1e-5)
env = NoiseEnvironment(n_l=1.0, n_m=200.0)

print(f"weak-coupling setup: G={params.g_lin}, kappa={params.kappa}, "
      f"Gamma_m={params.gamma_m}, N_l={env.n_l}, N_m={env.n_m}")
print(f"bath occupancy without feedback: {(env.n_m - 1) / 2:.1f}\n")

print(" a        kappa_eff   occupancy (Lyapunov)  occupancy (closed form)")
for a in (0.90, 0.95, 0.98, 0.99, 0.995, 0.999):
    ke = 2 * params.kappa * (1 - a)
    sigma = lyapunov_steady_state(assemble(params, env, passive_loop(a)))
    occ = mean_occupancy(sigma[2:, 2:])
    occ_cf = (cooling_sigma_cf(ke, 0.0, params.kappa, params.g_lin,
                               params.gamma_m, env.n_l, env.n_m) - 1) / 2
    print(f" {a:<8} {ke:<11.4g} {occ:<21.6f} {occ_cf:.6f}")

a_opt, b_opt, occ_opt = optimize_cooling_weak(params, env)
print(f"\nanalytic optimum: a = {a_opt}, b = {b_opt} "
      f"(kappa_eff = 2G = {2 * params.g_lin})")
print(f"optimal occupancy: {occ_opt:.6f}")
print(f"sigma_m_opt check: {(sigma_m_opt(params.g_lin, params.gamma_m, env.n_l, env.n_m) - 1) / 2:.6f}")
