"""
Drift/diffusion assembly, stability tests, Lyapunov steady states and exact
covariance propagation for the two-mode optomechanical system.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .gaussian import check_covariance, omega
from .loops import FeedbackLoop, cf_coupling, cf_hamiltonian_correction
from .model import NoiseEnvironment, SystemParams, bare_coupling_matrix, hamiltonian_matrix

HURWITZ_THRESHOLD = -1e-12

_OMEGA2 = omega(2)


@dataclass(frozen=True)
class LinearDynamics:
    """Drift matrix A and diffusion matrix D of sigma_dot = A sigma + sigma A^T + D."""

    a: np.ndarray
    d: np.ndarray
    params: SystemParams | None = None
    env: NoiseEnvironment | None = None
    loop: FeedbackLoop | None = None


def assemble(
    params: SystemParams,
    env: NoiseEnvironment,
    loop: FeedbackLoop | None = None,
    two_optical_interfaces: bool | None = None,
) -> LinearDynamics:
    """
    Build (A, D) from the system Hamiltonian and environment couplings.

    A = Om (H_S + H_cf) + (1/2) Om C Om_env C^T and D = Om C sigma_in C^T Om^T.
    Without a loop the system couples through a single optical interface unless
    two_optical_interfaces is set; with a loop the modified 4x6 coupling of the
    feedback setup is used.
    """
    h = hamiltonian_matrix(params)
    if loop is not None:
        c = cf_coupling(loop, params)
        h = h.copy()
        h[:2, :2] += cf_hamiltonian_correction(loop, params.kappa)
        n_opt = 2
    else:
        two = bool(two_optical_interfaces)
        c = bare_coupling_matrix(params, two_optical_interfaces=two)
        n_opt = 2 if two else 1
    om_env = omega(n_opt + 1)
    a = _OMEGA2 @ h + 0.5 * _OMEGA2 @ c @ om_env @ c.T
    sigma_in = env.sigma_in(n_opt)
    d = _OMEGA2 @ c @ sigma_in @ c.T @ _OMEGA2.T
    d = 0.5 * (d + d.T)
    return LinearDynamics(a=a, d=d, params=params, env=env, loop=loop)


def spectral_abscissa(a: np.ndarray) -> float:
    """Largest real part of the eigenvalues of a."""
    return float(np.max(np.real(np.linalg.eigvals(a))))


def is_hurwitz(dyn: LinearDynamics | np.ndarray) -> tuple[bool, float]:
    """Return (stable, spectral abscissa); stable means abscissa < -1e-12."""
    a = dyn.a if isinstance(dyn, LinearDynamics) else np.asarray(dyn)
    abscissa = spectral_abscissa(a)
    return abscissa < HURWITZ_THRESHOLD, abscissa


def blue_eigenvalues(kappa_eff: float, g: float, gamma_m: float) -> np.ndarray:
    """
    Closed-form drift eigenvalues of the blue-sideband RWA system with a
    passive loop: (1/4)(-gamma_m - kappa_eff +- sqrt(16 G^2 + gamma_m^2
    - 2 gamma_m kappa_eff + kappa_eff^2)), each doubly degenerate.
    """
    root = np.sqrt(16.0 * g * g + gamma_m * gamma_m - 2.0 * gamma_m * kappa_eff + kappa_eff**2)
    lam_plus = 0.25 * (-gamma_m - kappa_eff + root)
    lam_minus = 0.25 * (-gamma_m - kappa_eff - root)
    return np.array([lam_minus, lam_minus, lam_plus, lam_plus])


def lyapunov_steady_state(dyn: LinearDynamics, validate: bool = True) -> np.ndarray:
    """
    Steady-state covariance solving A sigma + sigma A^T + D = 0.

    Solved through the Kronecker-lifted 16x16 linear system
    (A (+) A) vec(sigma) = -vec(D); the result is symmetrized and checked for
    physicality.
    """
    stable, abscissa = is_hurwitz(dyn)
    if not stable:
        raise ValueError(
            f"no steady state: drift is not Hurwitz (spectral abscissa {abscissa:.6g})"
        )
    a, d = dyn.a, dyn.d
    n = a.shape[0]
    lifted = np.kron(a, np.eye(n)) + np.kron(np.eye(n), a)
    cond = np.linalg.cond(lifted)
    if cond > 1e14:
        raise np.linalg.LinAlgError(
            f"Lyapunov system is numerically singular (condition number {cond:.3g})"
        )
    sigma = np.linalg.solve(lifted, -d.reshape(-1)).reshape(n, n)
    sigma = 0.5 * (sigma + sigma.T)
    if validate:
        check_covariance(sigma)
    return sigma


def _propagator_step(a: np.ndarray, d: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """
    One exact covariance step: returns (M, Q) with M = expm(A h) and
    Q = int_0^h expm(A s) D expm(A^T s) ds, so sigma -> M sigma M^T + Q.

    Q comes from the Kronecker-lifted identity A Q + Q A^T = M D M^T - D; a
    Van Loan block-exponential fallback covers the singular lifted system.
    """
    n = a.shape[0]
    m = expm(a * h)
    lifted = np.kron(a, np.eye(n)) + np.kron(np.eye(n), a)
    rhs = (m @ d @ m.T - d).reshape(-1)
    if np.linalg.cond(lifted) < 1e12:
        q = np.linalg.solve(lifted, rhs).reshape(n, n)
    else:
        block = np.zeros((2 * n, 2 * n))
        block[:n, :n] = a
        block[:n, n:] = d
        block[n:, n:] = -a.T
        eb = expm(block * h)
        q = eb[:n, n:] @ m.T
    return m, 0.5 * (q + q.T)


def integrate(
    dyn: LinearDynamics,
    sigma0: np.ndarray,
    t_final: float,
    dt_out: float,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Propagate sigma_dot = A sigma + sigma A^T + D from sigma0.

    Uses exact propagator steps (matrix exponential plus the exact noise
    integral), so accuracy is set by round-off, not by the step size. Returns
    (times, sigmas) with sigmas sampled every dt_out; time zero is included.
    """
    if t_final <= 0:
        raise ValueError("t_final must be positive")
    if dt_out <= 0:
        raise ValueError("dt_out must be positive")
    check_covariance(sigma0, tol=1e-7)

    omega_m = dyn.params.omega_m if dyn.params is not None else 1.0
    abscissa = abs(spectral_abscissa(dyn.a))
    h = 0.01 * 2.0 * np.pi / omega_m
    if abscissa > 0:
        h = min(h, 0.1 / abscissa)
    # land output samples exactly: step an integer number of times per sample
    n_sub = max(1, int(np.ceil(dt_out / h)))
    h = dt_out / n_sub
    m, q = _propagator_step(dyn.a, dyn.d, h)

    n_out = int(np.floor(t_final / dt_out + 1e-9))
    times = np.arange(n_out + 1) * dt_out
    sigmas = np.empty((n_out + 1, 4, 4))
    sigma = np.array(sigma0, dtype=float)
    sigmas[0] = sigma
    for i in range(1, n_out + 1):
        for _ in range(n_sub):
            sigma = m @ sigma @ m.T + q
        sigma = 0.5 * (sigma + sigma.T)
        sigmas[i] = sigma
        if np.max(np.abs(sigma)) > 1e6:
            raise FloatingPointError(
                f"covariance diverged beyond 1e6 at t = {times[i]:.6g}"
            )
    return times, sigmas
