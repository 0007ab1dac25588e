"""
In-loop Gaussian CP-maps (E, F) for coherent feedback, and the coupling and
Hamiltonian modifications they induce on the cavity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .gaussian import omega
from .model import SystemParams

CCR_TOL = 1e-10

_OMEGA1 = omega(1)
_SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])


class LoopKind(Enum):
    PASSIVE = "passive"
    SQUEEZE_LOSS = "squeeze-loss"
    TMS = "two-mode-squeeze"
    TMS_FLIPPED = "two-mode-squeeze-flipped"
    CUSTOM = "custom"


@dataclass(frozen=True)
class FeedbackLoop:
    """A Gaussian CP-map in the loop, r_in2 = E r_out1 + F r_ancilla."""

    e: np.ndarray
    f: np.ndarray
    kind: LoopKind = LoopKind.CUSTOM
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        e = np.asarray(self.e, dtype=float)
        f = np.asarray(self.f, dtype=float)
        if e.shape != (2, 2) or f.shape != (2, 2):
            raise ValueError("E and F must be 2x2 real matrices")
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "f", f)
        ccr = e @ _OMEGA1 @ e.T + f @ _OMEGA1 @ f.T - _OMEGA1
        if np.max(np.abs(ccr)) > CCR_TOL:
            raise ValueError(
                f"loop violates the CCR condition E Om E^T + F Om F^T = Om "
                f"(max residual {np.max(np.abs(ccr)):.3g})"
            )

    @property
    def is_passive(self) -> bool:
        res = self.e @ self.e.T + self.f @ self.f.T - np.eye(2)
        return bool(np.max(np.abs(res)) <= CCR_TOL)


def passive_loop(a: float, b: float = 0.0) -> FeedbackLoop:
    """
    Interferometric loop: E = [[a, b], [-b, a]], F = [[c, 0], [0, c]] with
    c = sqrt(1 - a^2 - b^2). Requires a^2 + b^2 <= 1.
    """
    if a * a + b * b > 1.0 + 1e-15:
        raise ValueError(f"passive loop requires a^2 + b^2 <= 1, got {a*a + b*b}")
    c = np.sqrt(max(1.0 - a * a - b * b, 0.0))
    e = np.array([[a, b], [-b, a]])
    f = c * np.eye(2)
    return FeedbackLoop(e, f, LoopKind.PASSIVE, {"a": a, "b": b, "c": c, "d": 0.0})


def squeeze_loss_loop(eta: float, z: float) -> FeedbackLoop:
    """
    Loss followed by squeezing: E = diag(eta z, eta/z),
    F = diag(sqrt(1-eta^2) z, sqrt(1-eta^2)/z). Requires 0 <= eta <= 1, z > 0.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    if z <= 0:
        raise ValueError(f"z must be positive, got {z}")
    root = np.sqrt(max(1.0 - eta * eta, 0.0))
    e = np.diag([eta * z, eta / z])
    f = np.diag([root * z, root / z])
    return FeedbackLoop(e, f, LoopKind.SQUEEZE_LOSS, {"eta": eta, "z": z})


def two_mode_squeeze_loop(r: float, flipped: bool = False) -> FeedbackLoop:
    """
    Two-mode squeezing with the ancilla: E = +-cosh(r) 1, F = +-sinh(r) diag(1,-1).

    The flipped variant (overall sign change, realized with phase shifters)
    increases rather than decreases the effective cavity damping and is the
    stabilizing one.
    """
    if r < 0:
        raise ValueError(f"two-mode squeezing parameter must be >= 0, got {r}")
    sign = -1.0 if flipped else 1.0
    e = sign * np.cosh(r) * np.eye(2)
    f = sign * np.sinh(r) * np.diag([1.0, -1.0])
    kind = LoopKind.TMS_FLIPPED if flipped else LoopKind.TMS
    return FeedbackLoop(e, f, kind, {"r": r})


def custom_loop(e: np.ndarray, f: np.ndarray) -> FeedbackLoop:
    """Raw (E, F) loop; the CCR condition is validated at construction."""
    return FeedbackLoop(np.asarray(e, dtype=float), np.asarray(f, dtype=float))


def kappa_eff(loop: FeedbackLoop, kappa: float) -> float:
    """
    Effective cavity loss rate of the fed-back cavity.

    Passive loops give 2 kappa (1 - a); the flipped two-mode squeezing loop
    gives kappa_S = 2 kappa (1 + cosh r).
    """
    if loop.kind is LoopKind.PASSIVE:
        return 2.0 * kappa * (1.0 - loop.params["a"])
    if loop.kind is LoopKind.TMS_FLIPPED:
        return 2.0 * kappa * (1.0 + np.cosh(loop.params["r"]))
    if loop.kind is LoopKind.TMS:
        return 2.0 * kappa * (1.0 - np.cosh(loop.params["r"]))
    raise ValueError(f"no scalar effective loss rate for loop kind {loop.kind}")


def effective_optical_noise(loop: FeedbackLoop, n_l: float) -> float:
    """Effective optical input eigenvalue N_S = N_l cosh(r) for flipped TMS loops."""
    if loop.kind is not LoopKind.TMS_FLIPPED:
        raise ValueError("effective optical noise is defined for the flipped TMS loop")
    return n_l * np.cosh(loop.params["r"])


def cf_coupling(loop: FeedbackLoop, params: SystemParams) -> np.ndarray:
    """
    4x6 coupling matrix of the fed-back system to (interface-1, ancilla,
    mechanical) channels: optical blocks sqrt(k) Om^T (1 - E) and
    sqrt(k) Om^T F, mechanical block sqrt(gamma_m) Om^T.
    """
    sk = np.sqrt(params.kappa)
    om_t = _OMEGA1.T
    c = np.zeros((4, 6))
    c[:2, :2] = sk * om_t - sk * om_t @ loop.e
    c[:2, 2:4] = sk * om_t @ loop.f
    c[2:, 4:] = np.sqrt(params.gamma_m) * om_t
    return c


def cf_hamiltonian_correction(loop: FeedbackLoop, kappa: float) -> np.ndarray:
    """Optical Hamiltonian shift H_cf = kappa (Om^T E + E^T Om) induced by the loop."""
    return kappa * (_OMEGA1.T @ loop.e + loop.e.T @ _OMEGA1)
