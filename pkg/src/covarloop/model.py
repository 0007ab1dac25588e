"""
Optomechanical system parameters, Hamiltonian matrices and bare couplings.

All rates and frequencies are in units of the mechanical frequency
(omega_m = 1 unless explicitly overridden).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .gaussian import omega


class Regime(Enum):
    """Driving regime selecting the quadratic Hamiltonian used for the drift."""

    RED_RWA = "red-rwa"
    BLUE_RWA = "blue-rwa"
    FULL = "full"


@dataclass(frozen=True)
class SystemParams:
    """
    Optomechanical parameters.

    g_lin is the linearized coupling strength, kappa the per-interface cavity
    loss rate and gamma_m the mechanical loss rate. delta is only used in the
    FULL regime (red sideband is delta = -omega_m, blue is +omega_m).
    """

    g_lin: float
    kappa: float
    gamma_m: float
    regime: Regime = Regime.RED_RWA
    delta: float = -1.0
    omega_m: float = 1.0

    def __post_init__(self):
        for name in ("g_lin", "kappa", "gamma_m"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative, got {getattr(self, name)}")
        if self.omega_m <= 0:
            raise ValueError("omega_m must be positive")


@dataclass(frozen=True)
class NoiseEnvironment:
    """
    Thermal input noise: covariance eigenvalues N = 2*nbar + 1 per channel.

    n_l applies to every optical channel (both interfaces and the loop ancilla
    are taken at the same temperature), n_m to the mechanical bath.
    """

    n_l: float = 1.0
    n_m: float = 1.0

    def __post_init__(self):
        if self.n_l < 1.0 or self.n_m < 1.0:
            raise ValueError("input covariance eigenvalues must be >= 1 (vacuum)")

    @classmethod
    def from_occupancy(cls, nbar_l: float = 0.0, nbar_m: float = 0.0) -> "NoiseEnvironment":
        """Build from mean excitation numbers via N = 2*nbar + 1."""
        return cls(n_l=2.0 * nbar_l + 1.0, n_m=2.0 * nbar_m + 1.0)

    def sigma_in(self, n_optical_channels: int) -> np.ndarray:
        """Input covariance for the given number of optical channels plus one mechanical."""
        diag = [self.n_l] * (2 * n_optical_channels) + [self.n_m] * 2
        return np.diag(diag)


def hamiltonian_matrix(params: SystemParams) -> np.ndarray:
    """
    4x4 quadratic form H of the system Hamiltonian (H_hat = r^T H r / 2).

    RWA regimes store the interaction-picture forms; FULL stores the lab-frame
    Hamiltonian with detuning params.delta.
    """
    g = params.g_lin
    h = np.zeros((4, 4))
    if params.regime is Regime.RED_RWA:
        # G (x_l x_m + p_l p_m)
        h[0, 2] = h[2, 0] = g
        h[1, 3] = h[3, 1] = g
    elif params.regime is Regime.BLUE_RWA:
        # G (x_l x_m - p_l p_m)
        h[0, 2] = h[2, 0] = g
        h[1, 3] = h[3, 1] = -g
    else:
        h[0, 0] = h[1, 1] = -params.delta
        h[2, 2] = h[3, 3] = params.omega_m
        h[0, 2] = h[2, 0] = 2.0 * g
    return h


def bare_coupling_matrix(params: SystemParams, two_optical_interfaces: bool = False) -> np.ndarray:
    """
    Environment coupling matrix without a feedback loop.

    Single interface: 4x4 block-diag(sqrt(kappa) Omega^T, sqrt(gamma_m) Omega^T).
    Two interfaces: 4x6 with identical sqrt(kappa) Omega^T blocks in both
    optical channel slots.
    """
    om1_t = omega(1).T
    opt = np.sqrt(params.kappa) * om1_t
    mech = np.sqrt(params.gamma_m) * om1_t
    if two_optical_interfaces:
        c = np.zeros((4, 6))
        c[:2, :2] = opt
        c[:2, 2:4] = opt
        c[2:, 4:] = mech
    else:
        c = np.zeros((4, 4))
        c[:2, :2] = opt
        c[2:, 2:] = mech
    return c
