"""
Steady-state covariance for a passive feedback loop with in-loop delay,
computed from the frequency-domain transfer function of the delayed
Langevin equation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec

from .gaussian import check_covariance, omega
from .model import NoiseEnvironment, Regime, SystemParams, hamiltonian_matrix

_OMEGA2 = omega(2)
_OMEGA3 = omega(3)
_P_OPT = np.diag([1.0, 1.0, 0.0, 0.0])

TAIL_FRACTION = 1e-9


@dataclass(frozen=True)
class DelayedLoopSpec:
    """
    Passive loop (transmission a, ancilla mixing c = sqrt(1 - a^2)) whose
    fed-back beam arrives after a delay tau, attached to a red-RWA system.
    """

    a: float
    tau: float
    params: SystemParams
    env: NoiseEnvironment

    def __post_init__(self):
        if not 0.0 <= self.a <= 1.0:
            raise ValueError(f"feedback transmission a must lie in [0, 1], got {self.a}")
        if self.tau < 0:
            raise ValueError(f"delay must be nonnegative, got {self.tau}")
        if self.params.regime is not Regime.RED_RWA:
            raise ValueError("delayed loop solver supports the red-RWA regime only")

    @property
    def c(self) -> float:
        return float(np.sqrt(1.0 - self.a * self.a))


def _open_loop_drift(spec: DelayedLoopSpec) -> np.ndarray:
    """Drift of the delayed Langevin equation: two open optical interfaces, no loop."""
    p = spec.params
    h = hamiltonian_matrix(p)
    damping = np.diag([-p.kappa, -p.kappa, -p.gamma_m / 2.0, -p.gamma_m / 2.0])
    return _OMEGA2 @ h + damping


def transfer_function(spec: DelayedLoopSpec, w: float) -> np.ndarray:
    """
    4x6 complex transfer function R(w) = [-i w 1 - A~(w)]^{-1} B(w), mapping
    frequency-domain inputs (interface 1, ancilla, mechanical) to the system
    quadratures. The delay enters through phases exp(i w tau).
    """
    p = spec.params
    a0 = _open_loop_drift(spec)
    phase = np.exp(1j * w * spec.tau)
    a_tilde = a0 + _P_OPT * (spec.a * p.kappa * phase)
    b = np.zeros((4, 6), dtype=complex)
    sk = np.sqrt(p.kappa)
    b[0, 0] = b[1, 1] = sk * (1.0 - spec.a * phase)
    b[0, 2] = b[1, 3] = sk * spec.c
    b[2, 4] = b[3, 5] = np.sqrt(p.gamma_m)
    lhs = -1j * w * np.eye(4) - a_tilde
    try:
        return np.linalg.solve(lhs, b)
    except np.linalg.LinAlgError:
        # isolated singular frequency; evaluate at a nudged point
        return np.linalg.solve(lhs + 1e-13 * np.eye(4), b)


def _integrand(spec: DelayedLoopSpec, sigma_in: np.ndarray, w: float) -> np.ndarray:
    rp = transfer_function(spec, w)
    rm = transfer_function(spec, -w)
    m = rp @ (sigma_in + 1j * _OMEGA3) @ rm.T + rm @ (sigma_in - 1j * _OMEGA3) @ rp.T
    if np.max(np.abs(m.imag)) > 1e-8 * max(1.0, np.max(np.abs(m.real))):
        raise FloatingPointError("integrand acquired a non-negligible imaginary part")
    return m.real


def _tail_integral(spec: DelayedLoopSpec, cutoff: float) -> np.ndarray:
    """
    Closed form of the leading large-frequency tail, both sides combined.

    The symmetrized integrand is even in w and falls off as M(w)/w^2 with
    M(w) = 4 kappa N_l (1 - a cos(w tau)) 1_2 (+) 2 gamma_m N_m 1_2; the
    oscillatory part integrates to a sine-integral expression.
    """
    from scipy.special import sici

    p = spec.params
    tau = spec.tau
    inv = 1.0 / cutoff
    if tau == 0.0:
        osc = inv
    else:
        si, _ = sici(tau * cutoff)
        osc = np.cos(tau * cutoff) * inv - tau * (np.pi / 2.0 - si)
    opt = 2.0 * 4.0 * p.kappa * spec.env.n_l * (inv - spec.a * osc)
    mech = 2.0 * 2.0 * p.gamma_m * spec.env.n_m * inv
    return np.diag([opt, opt, mech, mech])


def delayed_steady_state(spec: DelayedLoopSpec, epsabs: float = 1e-10) -> np.ndarray:
    """
    Steady-state covariance sigma = (1/4 pi) int dw [R(w)(s_in + i Om)R(-w)^T
    + R(-w)(s_in - i Om)R(w)^T].

    The integral is evaluated adaptively on a symmetric window [-W, W] with
    quadrature seeded at the system eigenfrequencies (so the narrow mechanical
    resonance is not missed), plus the closed-form 1/w^2 tail beyond W. The
    window grows geometrically until the residual beyond the analytic tail
    (next order, ~1/W^3) is below 1e-9 of the accumulated integral.
    """
    p = spec.params
    sigma_in = spec.env.sigma_in(2)

    # resonances of the instantaneous (tau = 0) closed-loop drift
    a_inst = _open_loop_drift(spec) + _P_OPT * (spec.a * p.kappa)
    freqs = np.abs(np.imag(np.linalg.eigvals(a_inst)))
    seeds = sorted({0.0, p.omega_m, *np.round(freqs, 12)})

    def f(w):
        return _integrand(spec, sigma_in, w)

    def tail_residual(cutoff):
        # sampled coefficient of the 1/w^4 correction left after the analytic tail
        worst = 0.0
        for w in (cutoff, 1.37 * cutoff, 1.93 * cutoff):
            opt = 4.0 * p.kappa * spec.env.n_l * (1.0 - spec.a * np.cos(w * spec.tau))
            mech = 2.0 * p.gamma_m * spec.env.n_m
            lead = np.diag([opt, opt, mech, mech]) / (w * w)
            worst = max(worst, np.max(np.abs(f(w) - lead)) * w**4)
        return 2.0 * worst / (3.0 * cutoff**3)

    cutoff = max(50.0 * p.omega_m, 10.0 * max(seeds))
    breakpoints = sorted({s for fr in seeds for s in (-fr, fr)})
    total, _ = quad_vec(f, -cutoff, cutoff, epsabs=epsabs, epsrel=1e-10,
                        points=breakpoints, limit=20000)
    for _ in range(12):
        accumulated = total + _tail_integral(spec, cutoff)
        if tail_residual(cutoff) < TAIL_FRACTION * np.max(np.abs(accumulated)):
            total = accumulated
            break
        piece_hi, _ = quad_vec(f, cutoff, 2.0 * cutoff, epsabs=epsabs, epsrel=1e-10)
        piece_lo, _ = quad_vec(f, -2.0 * cutoff, -cutoff, epsabs=epsabs, epsrel=1e-10)
        total = total + piece_hi + piece_lo
        cutoff *= 2.0
    else:
        raise FloatingPointError(
            f"frequency integral did not converge: residual beyond cutoff {cutoff:.3g} "
            f"exceeds {TAIL_FRACTION:.1g} of the accumulated integral"
        )

    sigma = total / (4.0 * np.pi)
    sigma = 0.5 * (sigma + sigma.T)
    check_covariance(sigma, tol=1e-6)
    return sigma
