"""
Symplectic linear algebra and Gaussian-state metrics.

Conventions used throughout the package: hbar = 1, vacuum covariance equals
the identity, thermal covariance N*1 with N = 2*nbar + 1, and quadrature
ordering (x_l, p_l, x_m, p_m).
"""

from __future__ import annotations

import numpy as np

SYMMETRY_TOL = 1e-12
PHYSICALITY_TOL = 1e-9


def omega(n: int) -> np.ndarray:
    """Return the 2n x 2n symplectic form, a direct sum of [[0,1],[-1,0]] blocks."""
    if n < 1:
        raise ValueError(f"mode count must be >= 1, got {n}")
    block = np.array([[0.0, 1.0], [-1.0, 0.0]])
    out = np.zeros((2 * n, 2 * n))
    for j in range(n):
        out[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = block
    return out


def check_covariance(sigma: np.ndarray, tol: float = PHYSICALITY_TOL) -> None:
    """
    Validate that sigma is a physical covariance matrix.

    Raises ValueError if sigma is not square with even dimension, is not
    symmetric to SYMMETRY_TOL, or violates sigma + i*Omega >= 0 (equivalently
    some symplectic eigenvalue falls below 1 - tol).
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1] or sigma.shape[0] % 2:
        raise ValueError(f"covariance matrix must be 2n x 2n, got shape {sigma.shape}")
    if np.max(np.abs(sigma - sigma.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(sigma))):
        raise ValueError("covariance matrix is not symmetric")
    nus = symplectic_eigenvalues(sigma)
    if nus[0] < 1.0 - tol:
        raise ValueError(
            f"unphysical covariance matrix: smallest symplectic eigenvalue {nus[0]:.12g} < 1"
        )


def symplectic_eigenvalues(sigma: np.ndarray) -> np.ndarray:
    """
    Symplectic eigenvalues of a positive definite covariance matrix.

    Computed as the moduli of the eigenvalues of i*Omega*sigma, which come in
    pairs (+nu, -nu); the n distinct values are returned sorted ascending.
    """
    sigma = np.asarray(sigma, dtype=float)
    n = sigma.shape[0] // 2
    evals = np.linalg.eigvalsh(sigma)
    if evals[0] <= 0:
        raise ValueError("covariance matrix must be positive definite")
    spec = np.linalg.eigvals(1j * omega(n) @ sigma)
    moduli = np.sort(np.abs(spec))
    # eigenvalues pair up as (+nu, -nu); take one of each pair
    nus = moduli.reshape(n, 2).mean(axis=1)
    if np.max(np.abs(moduli.reshape(n, 2)[:, 0] - moduli.reshape(n, 2)[:, 1])) > 1e-9 * max(
        1.0, nus[-1]
    ):
        raise ValueError("symplectic spectrum did not pair up; input may be ill-conditioned")
    return nus


def mean_occupancy(sigma_m: np.ndarray) -> float:
    """Mean excitation number (nu - 1)/2 of a single-mode covariance matrix."""
    sigma_m = np.asarray(sigma_m, dtype=float)
    if sigma_m.shape != (2, 2):
        raise ValueError("mean_occupancy expects a single-mode 2x2 covariance matrix")
    nu = float(np.sqrt(np.linalg.det(sigma_m)))
    if nu < 1.0 - PHYSICALITY_TOL:
        raise ValueError(f"unphysical single-mode state: nu = {nu:.12g} < 1")
    return (nu - 1.0) / 2.0


def log_negativity(sigma: np.ndarray) -> float:
    """
    Logarithmic negativity of a two-mode Gaussian state.

    Uses the sub-block expression: with Delta~ = det(s_l) + det(s_m)
    - 2 det(s_lm), the smallest partially-transposed symplectic eigenvalue is
    nu~ = sqrt((Delta~ - sqrt(Delta~^2 - 4 det(sigma)))/2) and
    E_N = max(0, -log2 nu~).  Base-2 logarithm, so a two-mode squeezed
    vacuum with squeezing r carries E_N = 2r/ln 2.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (4, 4):
        raise ValueError("log_negativity expects a two-mode 4x4 covariance matrix")
    s_l = sigma[:2, :2]
    s_m = sigma[2:, 2:]
    s_lm = sigma[:2, 2:]
    delta = np.linalg.det(s_l) + np.linalg.det(s_m) - 2.0 * np.linalg.det(s_lm)
    disc = delta * delta - 4.0 * np.linalg.det(sigma)
    if disc < -1e-12 * max(1.0, delta * delta):
        raise ValueError("negative discriminant: partially transposed spectrum is complex")
    nu_sq = (delta - np.sqrt(max(disc, 0.0))) / 2.0
    if nu_sq < -1e-12:
        raise ValueError("negative squared symplectic eigenvalue after partial transpose")
    nu_minus = np.sqrt(max(nu_sq, 0.0))
    if nu_minus == 0.0:
        raise ValueError("vanishing partially transposed symplectic eigenvalue")
    return max(0.0, -np.log2(nu_minus))


def min_quadrature_eigenvalue(sigma_m: np.ndarray) -> float:
    """Smaller ordinary eigenvalue of a single-mode block; < 1 means squeezing."""
    sigma_m = np.asarray(sigma_m, dtype=float)
    if sigma_m.shape != (2, 2):
        raise ValueError("min_quadrature_eigenvalue expects a 2x2 block")
    return float(np.linalg.eigvalsh(sigma_m)[0])


def rotation(theta: float) -> np.ndarray:
    """2x2 rotation matrix by angle theta."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def pure_state_cm(theta: float, z: float) -> np.ndarray:
    """
    Covariance matrix R_theta diag(1/z, z) R_theta^T of a pure single-mode state.

    theta rotates the squeezing axes; z > 0 sets the squeezing (z = 1 is vacuum).
    """
    if z <= 0:
        raise ValueError(f"squeezing parameter must be positive, got {z}")
    r = rotation(theta)
    return r @ np.diag([1.0 / z, z]) @ r.T


def schatten2_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Schatten 2-norm distance sqrt(Tr[(a - b)^2]) between equal-size matrices."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    return float(np.sqrt(np.trace(diff @ diff)))
