"""
covarloop: Gaussian covariance dynamics for linearized optomechanical systems
under coherent feedback.

Builds drift/diffusion matrices for passive, squeezing and two-mode-squeezing
feedback loops, solves steady-state and transient covariance dynamics
(including time-delayed loops), and provides drivers for cooling,
entanglement, squeezing and state-transfer studies.
"""

from .gaussian import (
    log_negativity,
    mean_occupancy,
    min_quadrature_eigenvalue,
    omega,
    pure_state_cm,
    schatten2_distance,
    symplectic_eigenvalues,
)
from .model import NoiseEnvironment, Regime, SystemParams, bare_coupling_matrix, hamiltonian_matrix
from .loops import (
    FeedbackLoop,
    LoopKind,
    cf_coupling,
    cf_hamiltonian_correction,
    custom_loop,
    kappa_eff,
    passive_loop,
    squeeze_loss_loop,
    two_mode_squeeze_loop,
)
from .dynamics import (
    LinearDynamics,
    assemble,
    blue_eigenvalues,
    integrate,
    is_hurwitz,
    lyapunov_steady_state,
)
from .delay import DelayedLoopSpec, delayed_steady_state, transfer_function
from .protocols import (
    SweepTable,
    TransferResult,
    cooling_sigma_cf,
    entanglement_sweep,
    optimize_cooling_active,
    optimize_cooling_strong,
    optimize_cooling_weak,
    sigma_m_opt,
    squeezing_stability_boundary,
    squeezing_sweep,
    state_transfer,
    tms_stabilization,
)

__version__ = "0.1.0"
