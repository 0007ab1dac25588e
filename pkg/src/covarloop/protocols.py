"""
Reusable drivers for the cooling, entanglement, squeezing and state-transfer
studies, together with the closed-form cooling oracle and grid optimizers.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize

from .dynamics import LinearDynamics, assemble, is_hurwitz, integrate, lyapunov_steady_state
from .gaussian import (
    log_negativity,
    mean_occupancy,
    min_quadrature_eigenvalue,
    pure_state_cm,
    schatten2_distance,
)
from .loops import passive_loop, squeeze_loss_loop, two_mode_squeeze_loop
from .model import NoiseEnvironment, Regime, SystemParams

STABILITY_MARGIN_REL = 1e-3
REFINE_TOL = 1e-6

METRIC_COLUMNS = ("occupancy", "log_neg", "min_opt_eig", "min_mech_eig", "v_min", "abscissa")


@dataclass
class SweepTable:
    """Labeled grid of parameter points with per-point scalar metrics."""

    axis_names: tuple[str, ...]
    rows: list[dict] = field(default_factory=list)

    def add(self, axes: dict, stable: bool, **metrics) -> None:
        row = dict(axes)
        row["stable"] = bool(stable)
        row.update(metrics)
        self.rows.append(row)

    def values(self, name: str) -> np.ndarray:
        return np.array([row.get(name, np.nan) for row in self.rows])


@dataclass(frozen=True)
class TransferResult:
    """Summary of a state-transfer run (theta-averaged)."""

    v_min: float
    t_min: float
    min_mech_eigenvalue: float
    prepared_optics: bool


def _loop_for_kappa_eff(kappa_eff: float, kappa: float, b: float = 0.0):
    a = 1.0 - kappa_eff / (2.0 * kappa)
    return passive_loop(a, b)


def cooling_sigma_cf(
    kappa_eff: float,
    b: float,
    kappa: float,
    g: float,
    gamma_m: float,
    n_l: float,
    n_m: float,
) -> float:
    """
    Closed-form steady-state mechanical covariance eigenvalue of the red-RWA
    passive-feedback system.
    """
    gk = gamma_m * kappa_eff * (16.0 * b * b * kappa * kappa + (gamma_m + kappa_eff) ** 2)
    four_g2 = 4.0 * g * g
    num = gk * n_m + four_g2 * (gamma_m + kappa_eff) * (kappa_eff * n_l + gamma_m * n_m)
    den = four_g2 * (gamma_m + kappa_eff) ** 2 + gk
    if den == 0.0:
        raise ZeroDivisionError("all rates vanish; mechanical eigenvalue undefined")
    return num / den


def sigma_m_opt(g: float, gamma_m: float, n_l: float, n_m: float) -> float:
    """Mechanical eigenvalue at the optimal passive point b = 0, kappa_eff = 2G."""
    return (4.0 * g * g * n_l + gamma_m * (4.0 * g + gamma_m) * n_m) / (2.0 * g + gamma_m) ** 2


def optimize_cooling_weak(params: SystemParams, env: NoiseEnvironment) -> tuple[float, float, float]:
    """
    Optimal passive loop for red-RWA cooling: b = 0 and kappa_eff = 2G, i.e.
    a = 1 - G/kappa. Returns (a, b, occupancy).
    """
    g, kappa = params.g_lin, params.kappa
    if g >= 2.0 * kappa:
        warnings.warn(
            "optimal kappa_eff = 2G is out of reach (G >= 2 kappa); returning the boundary a -> -1"
        )
        a = -1.0 + 1e-9
    else:
        a = 1.0 - g / kappa
    sig = cooling_sigma_cf(2.0 * kappa * (1.0 - a), 0.0, kappa, g, params.gamma_m, env.n_l, env.n_m)
    return a, 0.0, (sig - 1.0) / 2.0


def _steady_occupancy(params: SystemParams, env: NoiseEnvironment, loop) -> float | None:
    dyn = assemble(params, env, loop)
    stable, _ = is_hurwitz(dyn)
    if not stable:
        return None
    sigma = lyapunov_steady_state(dyn)
    return mean_occupancy(sigma[2:, 2:])


def optimize_cooling_strong(
    params: SystemParams,
    env: NoiseEnvironment,
    g_grid: np.ndarray,
    kappa_eff_cap: float = 0.1,
    n_coarse: int = 41,
) -> SweepTable:
    """
    Per coupling strength, minimize the full-Hamiltonian steady-state
    occupancy over (kappa_eff, b) subject to kappa_eff <= min(4 kappa, cap).
    The table also records the no-feedback (single interface) baseline.
    """
    table = SweepTable(axis_names=("g",))
    kappa = params.kappa
    ke_max = min(4.0 * kappa * (1.0 - 1e-9), kappa_eff_cap)
    for g in np.atleast_1d(g_grid):
        p = SystemParams(g_lin=float(g), kappa=kappa, gamma_m=params.gamma_m,
                         regime=Regime.FULL, delta=params.delta, omega_m=params.omega_m)

        def occ(x):
            ke, b = x
            if not 0.0 < ke <= ke_max:
                return np.inf
            a = 1.0 - ke / (2.0 * kappa)
            if a * a + b * b >= 1.0:
                return np.inf
            val = _steady_occupancy(p, env, passive_loop(a, b))
            return np.inf if val is None else val

        coarse = [(occ((ke, 0.0)), ke) for ke in np.linspace(ke_max / n_coarse, ke_max, n_coarse)]
        best_val, best_ke = min(coarse)
        if not np.isfinite(best_val):
            raise RuntimeError(f"no stable feedback point found at G = {g}")
        res = minimize(occ, x0=[best_ke, 0.0], method="Nelder-Mead",
                       options={"xatol": REFINE_TOL * ke_max, "fatol": REFINE_TOL, "maxiter": 400})
        ke_opt, b_opt = res.x
        baseline = _steady_occupancy(p, env, None)
        table.add({"g": float(g)}, stable=True, occupancy=float(res.fun),
                  kappa_eff=float(min(ke_opt, ke_max)), b=float(b_opt),
                  baseline_occupancy=np.nan if baseline is None else float(baseline))
    return table


def optimize_cooling_active(
    params: SystemParams,
    env: NoiseEnvironment,
    n_eta: int = 51,
    n_z: int = 51,
) -> tuple[float, float, float, tuple[float, float]]:
    """
    Minimize red-RWA steady-state occupancy over squeeze-loss loops
    (eta in [0, 1], z in [1/3, 3] log-spaced grid), then refine locally.

    Returns (eta, z, occupancy) of the refined optimum plus the raw grid
    argmin (eta_grid, z_grid).
    """
    etas = np.linspace(0.0, 1.0, n_eta)
    zs = np.logspace(np.log10(1.0 / 3.0), np.log10(3.0), n_z)

    def occ(x):
        eta, z = x
        if not (0.0 <= eta <= 1.0 and z > 0.0):
            return np.inf
        val = _steady_occupancy(params, env, squeeze_loss_loop(eta, z))
        return np.inf if val is None else val

    best = (np.inf, 0.0, 1.0)
    for eta in etas:
        for z in zs:
            v = occ((eta, z))
            if v < best[0]:
                best = (v, eta, z)
    grid_argmin = (best[1], best[2])
    res = minimize(occ, x0=list(grid_argmin), method="Nelder-Mead",
                   options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 2000})
    return float(res.x[0]), float(res.x[1]), float(res.fun), grid_argmin


def _blue_params(params: SystemParams) -> SystemParams:
    if params.regime is not Regime.BLUE_RWA:
        raise ValueError("entanglement drivers require the blue-RWA regime")
    return params


def entanglement_sweep(
    params: SystemParams,
    env: NoiseEnvironment,
    loop_family: str,
    grid: np.ndarray,
    n_eta: int = 201,
) -> SweepTable:
    """
    Blue-sideband steady-state logarithmic negativity sweeps.

    loop_family "passive": grid is a set of kappa_eff values; each point
    records stability and E_N (0 when unstable, with the stable flag kept
    separately). loop_family "squeeze": grid is a set of in-loop squeezings z;
    each point records the maximum E_N over the beam-splitter parameter eta.
    """
    _blue_params(params)
    kappa = params.kappa
    if loop_family == "passive":
        table = SweepTable(axis_names=("kappa_eff",))
        for ke in np.atleast_1d(grid):
            dyn = assemble(params, env, _loop_for_kappa_eff(float(ke), kappa))
            stable, absc = is_hurwitz(dyn)
            en = log_negativity(lyapunov_steady_state(dyn)) if stable else 0.0
            table.add({"kappa_eff": float(ke)}, stable=stable, log_neg=en, abscissa=absc)
        return table
    if loop_family == "squeeze":
        table = SweepTable(axis_names=("z",))
        for z in np.atleast_1d(grid):
            def neg_en(eta):
                dyn = assemble(params, env, squeeze_loss_loop(float(eta), float(z)))
                stable, _ = is_hurwitz(dyn)
                if not stable:
                    return 0.0
                return -log_negativity(lyapunov_steady_state(dyn))
            etas = np.linspace(0.0, 1.0, n_eta)
            vals = np.array([neg_en(e) for e in etas])
            i = int(np.argmin(vals))
            lo, hi = etas[max(i - 1, 0)], etas[min(i + 1, n_eta - 1)]
            res = minimize(lambda x: neg_en(x[0]), x0=[etas[i]], method="Nelder-Mead",
                           options={"xatol": REFINE_TOL, "fatol": 1e-12})
            eta_opt = float(np.clip(res.x[0], lo, hi))
            table.add({"z": float(z)}, stable=True, log_neg=float(-res.fun), eta=eta_opt)
        return table
    raise ValueError(f"unknown loop family {loop_family!r}")


@dataclass(frozen=True)
class TmsStabilization:
    """Outcome of stabilizing a blue-sideband system with a flipped TMS loop."""

    r_analytic: float
    r_bisected: float
    log_neg: float
    passively_stabilizable: bool


def tms_stabilization(params: SystemParams, env: NoiseEnvironment) -> TmsStabilization:
    """
    Minimal flipped-TMS squeezing stabilizing the blue sideband:
    r* = acosh(2 G^2 / (kappa gamma_m) - 1), confirmed by bisection on the
    Hurwitz flag, with the steady-state E_N at r = r* (1 + 1e-3).
    """
    _blue_params(params)
    g, kappa, gamma_m = params.g_lin, params.kappa, params.gamma_m
    arg = 2.0 * g * g / (kappa * gamma_m) - 1.0
    if arg < 1.0:
        return TmsStabilization(0.0, 0.0, np.nan, passively_stabilizable=True)
    r_star = float(np.arccosh(arg))

    def abscissa_at(r):
        dyn = assemble(params, env, two_mode_squeeze_loop(r, flipped=True))
        return is_hurwitz(dyn)[1]

    r_bis = brentq(abscissa_at, max(r_star - 0.5, 0.0), r_star + 0.5, xtol=1e-6)
    dyn = assemble(params, env, two_mode_squeeze_loop(r_star * (1.0 + STABILITY_MARGIN_REL), flipped=True))
    en = log_negativity(lyapunov_steady_state(dyn))
    return TmsStabilization(r_star, float(r_bis), en, passively_stabilizable=False)


def squeezing_sweep(
    params: SystemParams,
    env: NoiseEnvironment,
    z: float,
    eta_grid: np.ndarray,
) -> SweepTable:
    """
    Steady-state optical and mechanical minimum quadrature eigenvalues against
    the beam-splitter parameter eta for a squeeze-loss loop with fixed z.
    Works for both the red-RWA and the full (strong coupling) regimes.
    """
    table = SweepTable(axis_names=("eta",))
    for eta in np.atleast_1d(eta_grid):
        dyn = assemble(params, env, squeeze_loss_loop(float(eta), z))
        stable, absc = is_hurwitz(dyn)
        if stable:
            sigma = lyapunov_steady_state(dyn)
            table.add({"eta": float(eta)}, stable=True,
                      min_opt_eig=min_quadrature_eigenvalue(sigma[:2, :2]),
                      min_mech_eig=min_quadrature_eigenvalue(sigma[2:, 2:]),
                      abscissa=absc)
        else:
            table.add({"eta": float(eta)}, stable=False, abscissa=absc)
    return table


def squeezing_stability_boundary(
    params: SystemParams,
    env: NoiseEnvironment,
    z: float,
    xtol: float = 1e-8,
) -> float:
    """Beam-splitter parameter eta at which the squeeze-loss setup loses stability."""
    def abscissa_at(eta):
        dyn = assemble(params, env, squeeze_loss_loop(float(eta), z))
        return is_hurwitz(dyn)[1]

    if abscissa_at(0.0) >= 0.0:
        raise ValueError("system is unstable even at eta = 0")
    if abscissa_at(1.0) < 0.0:
        return 1.0
    return float(brentq(abscissa_at, 0.0, 1.0, xtol=xtol))


def state_transfer(
    params: SystemParams,
    env: NoiseEnvironment,
    z_target: float,
    kappa_eff: float,
    theta_samples: int = 16,
    prepared_optics: bool = True,
    n_oscillations: float = 25.0,
    dt_out: float | None = None,
) -> TransferResult:
    """
    Pulsed red-sideband state transfer in the strong coupling regime.

    The optical mode starts in the target pure state (or a thermal state for
    the baseline run), the mechanics in a thermal state; the closest approach
    V_min = min_t || sigma_T - sigma_m(t) ||_2 over n_oscillations mechanical
    periods and the minimal transient mechanical eigenvalue are averaged over
    theta_samples uniformly spaced rotation angles of the target.
    """
    if params.regime is not Regime.FULL:
        raise ValueError("state transfer runs in the full linearized regime")
    loop = _loop_for_kappa_eff(kappa_eff, params.kappa)
    dyn = assemble(params, env, loop)
    t_final = n_oscillations * 2.0 * np.pi / params.omega_m
    if dt_out is None:
        dt_out = 2.0 * np.pi / (100.0 * params.omega_m)

    thetas = np.arange(theta_samples) * np.pi / theta_samples
    v_mins, t_mins, eig_mins = [], [], []
    for theta in thetas:
        target = pure_state_cm(theta, z_target)
        sigma0 = np.zeros((4, 4))
        sigma0[:2, :2] = target if prepared_optics else env.n_l * np.eye(2)
        sigma0[2:, 2:] = env.n_m * np.eye(2)
        times, sigmas = integrate(dyn, sigma0, t_final, dt_out)
        dists = np.array([schatten2_distance(target, s[2:, 2:]) for s in sigmas])
        eigs = np.array([min_quadrature_eigenvalue(s[2:, 2:]) for s in sigmas])
        i = int(np.argmin(dists))
        v_mins.append(dists[i])
        t_mins.append(times[i])
        eig_mins.append(eigs.min())
    return TransferResult(
        v_min=float(np.mean(v_mins)),
        t_min=float(np.mean(t_mins)),
        min_mech_eigenvalue=float(np.mean(eig_mins)),
        prepared_optics=prepared_optics,
    )
